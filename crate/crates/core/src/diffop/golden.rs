//! Operators used by the membership table and the normal-operator checks.

use super::{imag, int, rat, DiffOp, MultiOrder};

fn h(p: i32) -> DiffOp {
    DiffOp::inv_c(p)
}

fn sym(name: &str) -> DiffOp {
    DiffOp::symbol(name, -1)
}

/// `box = -c^{-2} dt^2 + dx^2`.
pub fn box_flat() -> DiffOp {
    &(-(h(2) * DiffOp::dt() * DiffOp::dt())) + &(DiffOp::dx() * DiffOp::dx())
}

/// Free operator `box - c^2`.
pub fn p0() -> DiffOp {
    &box_flat() - &h(-2)
}

/// Klein-Gordon operator with electric potential `V`, vector potential `A`,
/// scalar coupling `W` and metric coefficient `aleph`:
/// `-c^{-2}(dt + iV)^2 - (i dx + A)^2 - c^2 + W + c^{-4} aleph dt^2`.
pub fn kg_operator() -> DiffOp {
    let dtv = &DiffOp::dt() + &sym("V").scale(imag(1, 1));
    let dxa = &DiffOp::dx().scale(imag(1, 1)) + &sym("A");
    let time = -(h(2) * dtv.clone() * dtv);
    let space = -(dxa.clone() * dxa);
    let aleph = h(4) * sym("aleph") * DiffOp::dt() * DiffOp::dt();
    time + space - h(-2) + sym("W") + aleph
}

/// `+-i dt + (1/2)(i dx + A)^2 + V_eff` with
/// `V_eff = -+V - W/2 + aleph_sign * aleph/2`.
pub fn schrodinger_operator(sign: i32, aleph_sign: i32) -> DiffOp {
    let dxa = &DiffOp::dx().scale(imag(1, 1)) + &sym("A");
    let kin = (dxa.clone() * dxa).scale(rat(1, 2));
    let veff = sym("V").scale(int(-sign as i64)) + sym("W").scale(rat(-1, 2)) + sym("aleph").scale(rat(aleph_sign as i64, 2));
    DiffOp::dt().scale(imag(sign as i64, 1)) + kin + veff
}

/// `box_g - box` for a flat metric perturbed by `c^{-4} aleph dt^2` and
/// `S^{-1}` couplings `c^{-2} g_xx dx^2 + c^{-3} g_tx dt dx`.
pub fn metric_perturbation() -> DiffOp {
    let a = h(4) * sym("aleph") * DiffOp::dt() * DiffOp::dt();
    let b = h(2) * sym("g_xx") * DiffOp::dx() * DiffOp::dx();
    let c = h(3) * sym("g_tx") * DiffOp::dt() * DiffOp::dx();
    a + b + c
}

/// `P - P_1` where `P_1` freezes `beta`, `B`, `W` at `c = infinity` and
/// keeps the aleph term: generic `O(1/c)` corrections to the lower order
/// coefficients plus the remaining metric couplings.
pub fn p_minus_p1() -> DiffOp {
    let beta = h(3) * sym("beta_1") * DiffOp::dt().scale(imag(1, 1));
    let b = h(1) * sym("B_1") * DiffOp::dx().scale(imag(1, 1));
    let w = h(1) * sym("W_1");
    let g = &metric_perturbation() - &(h(4) * sym("aleph") * DiffOp::dt() * DiffOp::dt());
    beta + b + w + g
}

#[derive(Clone, Debug)]
pub struct GoldenRow {
    pub label: &'static str,
    pub op: DiffOp,
    pub expected: MultiOrder,
}

/// Published memberships checked by the harness.
pub fn membership_table() -> Vec<GoldenRow> {
    vec![
        GoldenRow { label: "box_g - box", op: metric_perturbation(), expected: MultiOrder::new(2, -1, 0, -2, -2) },
        GoldenRow {
            label: "c^-4 dt^2",
            op: h(4) * DiffOp::dt() * DiffOp::dt(),
            expected: MultiOrder::new(2, 0, 0, 0, 0),
        },
        GoldenRow {
            label: "c^-3 dt dx",
            op: h(3) * DiffOp::dt() * DiffOp::dx(),
            expected: MultiOrder::new(2, 0, 0, -1, -1),
        },
        GoldenRow { label: "P - P1", op: p_minus_p1(), expected: MultiOrder::new(2, -1, 1, -1, -1) },
        GoldenRow { label: "dx", op: DiffOp::dx(), expected: MultiOrder::new(1, 0, 1, 0, 0) },
    ]
}

/// `-+2i dt - Delta = -+2i dt + dx^2`.
pub fn free_normal_expected(sign: i32) -> DiffOp {
    &DiffOp::dt().scale(imag(-2 * sign as i64, 1)) + &(DiffOp::dx() * DiffOp::dx())
}
