//! Closed-form Clifford averages and the brute-force permutation-operator
//! checks behind them.

use magicflux::oracle::{
    averaged_entropy, averaged_entropy_alt, build_permutation_operator, fourth_moment_prediction, t_contraction_matrix,
    mean_purity_exact, tilde_delta_prediction, OperatorLabel, Perm,
};

fn main() -> magicflux::Result<()> {
    println!("E Tr rho_AB^2, N=8, N_AB=4: {:.7} (= 8192/65792)", mean_purity_exact(8, 4));
    println!("E (Tr rho_AB^2)^2, N=12, N_T=4: {:.4e}", fourth_moment_prediction(12, 4));
    for nt in 0..=4 {
        println!("  (3/4)^{nt} = {:.6}", tilde_delta_prediction(nt));
    }
    println!("averaged entropy at N=12: {} from the proof body, {} alternative form", averaged_entropy(12, 6), averaged_entropy_alt(12));

    for label in ["e", "(12)", "(12)(34)", "(1234)"] {
        let t = if label.contains('3') { 4 } else { 2 };
        let l = if label == "e" { OperatorLabel::Plain(Perm::identity(t)) } else { label.parse()? };
        let op = build_permutation_operator(&l, t, 2)?;
        println!("t={t} {label:<9} site trace {:>3}  n=2 trace {:>4}", op.site_trace(), op.trace());
    }

    for n in 1..=2 {
        println!("T-contraction matrix, n={n} (real parts):");
        for row in t_contraction_matrix(n)? {
            println!("  {}", row.iter().map(|c| format!("{:>7.2}", c.re)).collect::<Vec<_>>().join(" "));
        }
    }
    Ok(())
}
