//! Built-in sessions printed by `fixtures`.

/// The order Λ = {(a,b) ∈ Z_2 × Z_2 : a ≡ b mod 2} inside Γ = Z_2 × Z_2 with
/// I = rad Λ = 2Γ, its three indecomposable lattices, and small companions.
pub const E1: &str = "\
purity-lab/1
# Lambda = {(a,b) in Z2 x Z2 : a = b mod 2}, basis (1,1), (0,2)
precision 16
work 6
budget 1048576
order Lam p 2 unit 1 0 mult 1 0 ; 0 1 | 0 1 ; 0 2 components Q2:1 Q2:1
order Gam p 2 unit 1 1 mult 1 0 ; 0 0 | 0 0 ; 0 1 components Q2:1 Q2:1
const Lam t = 0 1
lattice Lambda over Lam regular
lattice R1 over Lam rank 1 act 1 | 0
lattice R2 over Lam rank 1 act 1 | 2
datum E1 lambda Lam gamma Gam embed 1 1 ; 0 2 n 1 m 1
interp F rr E1
interp Red reduce Lam 2
algebra Z4 cyclic 2 2
module M4 over Z4 regular
module M2 quotient M4 by 2
module M42 sum M4 M2
formula twice over Z4 = E y: x1 = y*2
formula tmult over Lam = E y: x1 = y*t
map pi from M4 to M2 matrix 2
map id4 from M4 to M4 matrix 1
formula ann2 over Z4 = x1*2 = 0
finlat N5 pentagon
finlat M3 diamond
";

/// A tame slot: one tube of rank 2 with a generic and two divisible points.
pub const E2: &str = "\
purity-lab/1
zgspace Tame
types 1
tube T type 1 qs E1 E2 hull S
generic 1 hull S
hom_to E1
hom_from E1
divisible S R
exceptional P type 0 hull R
end
finlat C3 chain 3
";
