fn main() {
    for &(mu, zj) in &[(0.5, 0.05), (0.5, 0.2), (0.3, 0.12), (1.4, 0.08)] {
        let a = lattice_qsim::meanfield::gutzwiller_ground(mu, zj, 10).unwrap();
        let b = lattice_qsim::meanfield::gutzwiller_ground(mu, zj, 12).unwrap();
        println!("mu={mu} zj={zj}: psi10={:.3e} psi12={:.3e} diff={:.3e}", a.psi, b.psi, (a.psi-b.psi).abs());
    }
}
