//! Membership table for the graded operator orders and the symbolic
//! normal-operator checks.

use kgnr_core::diffop::golden::{free_normal_expected, kg_operator, membership_table, p0, schrodinger_operator};
use kgnr_core::diffop::{int, normal_operator, MultiOrder};
use kgnr_core::schrodinger::AlephWiring;

#[derive(Clone, Debug)]
pub struct OrderRow {
    pub label: String,
    pub expected: MultiOrder,
    pub computed: Option<MultiOrder>,
    /// `computed == expected`.
    pub exact: bool,
    /// `computed <= expected` componentwise.
    pub member: bool,
}

#[derive(Clone, Debug)]
pub struct NormalCheck {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct OrdersTable {
    pub rows: Vec<OrderRow>,
    pub normal: Vec<NormalCheck>,
}

impl OrdersTable {
    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }

    pub fn normal_ok(&self) -> bool {
        self.normal.iter().all(|n| n.pass)
    }
}

/// Wiring of aleph in `V_eff` that the symbolic normal operator produces,
/// or `None` if neither matches.
pub fn symbolic_aleph_wiring() -> Option<AlephWiring> {
    let matches = |aleph_sign: i32| {
        [1, -1].iter().all(|&s| {
            normal_operator(&kg_operator(), s)
                .ok()
                .and_then(|n| n.proportional_to(&schrodinger_operator(s, aleph_sign)))
                == Some(int(-2))
        })
    };
    match (matches(1), matches(-1)) {
        (true, false) => Some(AlephWiring::Plus),
        (false, true) => Some(AlephWiring::Minus),
        _ => None,
    }
}

/// Mismatches are reported in the table, never raised.
pub fn verify_orders() -> OrdersTable {
    let rows = membership_table()
        .into_iter()
        .map(|g| {
            let computed = g.op.multi_order();
            OrderRow {
                label: g.label.to_string(),
                expected: g.expected,
                computed,
                exact: computed == Some(g.expected),
                member: computed.is_some_and(|c| c.le(&g.expected)),
            }
        })
        .collect();
    let mut normal = Vec::new();
    for s in [1, -1] {
        let pm = if s > 0 { '+' } else { '-' };
        let got = normal_operator(&p0(), s);
        let want = free_normal_expected(s);
        normal.push(NormalCheck {
            label: format!("N(P0{pm})"),
            pass: got.as_ref().is_ok_and(|g| *g == want),
            detail: match got {
                Ok(g) => format!("{g}  (want {want})"),
                Err(e) => e.to_string(),
            },
        });
        let full = normal_operator(&kg_operator(), s);
        let ratio = full.as_ref().ok().and_then(|n| n.proportional_to(&schrodinger_operator(s, 1)));
        normal.push(NormalCheck {
            label: format!("N(P{pm}) = -2 S{pm}"),
            pass: ratio == Some(int(-2)),
            detail: match full {
                Ok(n) => format!("{n}"),
                Err(e) => e.to_string(),
            },
        });
    }
    OrdersTable { rows, normal }
}
