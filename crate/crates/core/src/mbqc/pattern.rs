//! Measurement patterns on a rectangular cluster and the circuit compiler.
//!
//! Wire `w` runs along row `2w`; odd rows are spacers. A spacer is measured
//! in Z, which cuts it out of the cluster, except where a controlled-Z is
//! needed: there it is measured in Y ("bridge"), which leaves a C-phase
//! between the two neighbouring wires. Every measured wire site applies
//! `H·P(−φ)` to its logical qubit, with `P(α) = diag(1, e^{iα})`, and
//! produces an `X^s` byproduct.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use super::circuit::{Circuit, Gate};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plane {
    /// Basis `(|0⟩ ± e^{iφ}|1⟩)/√2`, outcome 0 for `+`.
    XY,
    /// Computational basis; the angle is ignored.
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SiteAction {
    /// The measured angle is `(−1)^{Σ outcomes in x_domain} · angle`.
    Measure {
        plane: Plane,
        angle: f64,
        x_domain: Vec<usize>,
    },
    Output { wire: usize },
}

impl SiteAction {
    fn z() -> Self {
        Self::Measure {
            plane: Plane::Z,
            angle: 0.0,
            x_domain: vec![],
        }
    }
}

/// Sites are numbered `t·width + row`. The last column holds the outputs;
/// each output wire `w` is corrected by `Z^{z_w} X^{x_w}` with `x_w`, `z_w`
/// the parities of `x_correction[w]` and `z_correction[w]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub width: usize,
    pub n_wires: usize,
    pub columns: Vec<Vec<SiteAction>>,
    pub x_correction: Vec<Vec<usize>>,
    pub z_correction: Vec<Vec<usize>>,
}

impl Pattern {
    pub fn site(&self, column: usize, row: usize) -> usize {
        column * self.width + row
    }

    pub fn n_sites(&self) -> usize {
        self.width * self.columns.len()
    }

    /// Structural checks plus feed-forward causality: every dependency is a
    /// measured site in a strictly earlier column.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedDependency(m));
        if self.width == 0 || self.columns.is_empty() {
            return bad("empty pattern".into());
        }
        if self.columns.iter().any(|c| c.len() != self.width) {
            return bad(format!("every column must have {} sites", self.width));
        }
        let last = self.columns.len() - 1;
        let mut seen = vec![false; self.n_wires];
        for (t, col) in self.columns.iter().enumerate() {
            for (r, a) in col.iter().enumerate() {
                match a {
                    SiteAction::Output { wire } => {
                        if t != last {
                            return bad(format!("output at site {} before the last column", self.site(t, r)));
                        }
                        if *wire >= self.n_wires || std::mem::replace(&mut seen[*wire], true) {
                            return bad(format!("output wire {wire} invalid or repeated"));
                        }
                    }
                    SiteAction::Measure { angle, x_domain, .. } => {
                        if !angle.is_finite() {
                            return Err(Error::InvalidArgument(format!(
                                "non-finite angle at site {}",
                                self.site(t, r)
                            )));
                        }
                        for &s in x_domain {
                            if s / self.width >= t || !self.is_measured(s) {
                                return bad(format!(
                                    "site {} depends on site {s}, which is not measured earlier",
                                    self.site(t, r)
                                ));
                            }
                        }
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("not every wire has an output".into());
        }
        if self.x_correction.len() != self.n_wires || self.z_correction.len() != self.n_wires {
            return bad("one correction domain per wire required".into());
        }
        for &s in self.x_correction.iter().chain(&self.z_correction).flatten() {
            if !self.is_measured(s) {
                return bad(format!("correction reads site {s}, which is never measured"));
            }
        }
        Ok(())
    }

    fn is_measured(&self, site: usize) -> bool {
        let (t, r) = (site / self.width, site % self.width);
        matches!(
            self.columns.get(t).and_then(|c| c.get(r)),
            Some(SiteAction::Measure { .. })
        )
    }
}

/// Logical content of one measured column: `H·P(−φ_w)` on every wire,
/// preceded by a C-phase on each bridged pair `(w, w + 1)`.
struct ColumnPlan {
    phis: Vec<f64>,
    bridges: Vec<usize>,
}

enum Op {
    Single { wire: usize, phis: Vec<f64> },
    Bridge { upper: usize },
}

fn expand(gate: &Gate, ops: &mut Vec<Op>) -> Result<()> {
    let rot = |wire, a: f64, b: f64, g: f64| Op::Single {
        wire,
        phis: vec![-a, -b, -g, 0.0],
    };
    let bridge = |a: usize, b: usize| {
        if a.abs_diff(b) != 1 {
            return Err(Error::UnsupportedGate(format!(
                "two-qubit gate on non-adjacent wires {a} and {b}"
            )));
        }
        Ok(Op::Bridge { upper: a.min(b) })
    };
    match *gate {
        Gate::Rot { wire, alpha, beta, gamma } => ops.push(rot(wire, alpha, beta, gamma)),
        Gate::Rz { wire, theta } => ops.push(Op::Single {
            wire,
            phis: vec![-theta, 0.0],
        }),
        Gate::H { wire } => ops.push(rot(wire, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)),
        Gate::Cz { a, b } => ops.push(bridge(a, b)?),
        Gate::Cnot { control, target } => {
            let b = bridge(control, target)?;
            ops.push(rot(target, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));
            ops.push(b);
            ops.push(rot(target, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2));
        }
    }
    Ok(())
}

/// Packs consecutive operations on disjoint wires into layers and unrolls
/// each layer into columns. Single-qubit layers take 4 columns (2 when only
/// Z-rotations are present); a C-phase layer takes a bridge column followed
/// by a plain column.
fn plan_columns(n: usize, ops: &[Op]) -> Vec<ColumnPlan> {
    enum Layer {
        Single(Vec<Vec<f64>>),
        Bridges(Vec<usize>),
    }
    fn flush(layer: Layer, n: usize, out: &mut Vec<ColumnPlan>) {
        match layer {
            Layer::Single(per_wire) => {
                let len = per_wire.iter().map(Vec::len).max().unwrap_or(0).max(2);
                for k in 0..len {
                    out.push(ColumnPlan {
                        phis: per_wire.iter().map(|p| p.get(k).copied().unwrap_or(0.0)).collect(),
                        bridges: vec![],
                    });
                }
            }
            Layer::Bridges(bridges) => {
                out.push(ColumnPlan { phis: vec![0.0; n], bridges });
                out.push(ColumnPlan { phis: vec![0.0; n], bridges: vec![] });
            }
        }
    }
    let mut out = Vec::new();
    let mut current: Option<(Layer, Vec<bool>)> = None;
    for op in ops {
        let wires = match op {
            Op::Single { wire, .. } => vec![*wire],
            Op::Bridge { upper } => vec![*upper, upper + 1],
        };
        let fits = match (&current, op) {
            (Some((Layer::Single(_), used)), Op::Single { .. })
            | (Some((Layer::Bridges(_), used)), Op::Bridge { .. }) => wires.iter().all(|&w| !used[w]),
            _ => false,
        };
        if !fits {
            if let Some((layer, _)) = current.take() {
                flush(layer, n, &mut out);
            }
            let layer = match op {
                Op::Single { .. } => Layer::Single(vec![vec![]; n]),
                Op::Bridge { .. } => Layer::Bridges(vec![]),
            };
            current = Some((layer, vec![false; n]));
        }
        let (layer, used) = current.as_mut().expect("layer present");
        for &w in &wires {
            used[w] = true;
        }
        match (layer, op) {
            (Layer::Single(per_wire), Op::Single { wire, phis }) => per_wire[*wire] = phis.clone(),
            (Layer::Bridges(b), Op::Bridge { upper }) => b.push(*upper),
            _ => unreachable!("layer kind matches op"),
        }
    }
    match current {
        Some((layer, _)) => flush(layer, n, &mut out),
        None => flush(Layer::Single(vec![vec![]; n]), n, &mut out),
    }
    out
}

fn toggle(set: &mut BTreeSet<usize>, site: usize) {
    if !set.remove(&site) {
        set.insert(site);
    }
}

fn xor_into(set: &mut BTreeSet<usize>, other: &BTreeSet<usize>) {
    for &s in other {
        toggle(set, s);
    }
}

/// `φ ≡ 0 (mod π)`: the sign of the angle is irrelevant.
fn sign_free(phi: f64) -> bool {
    let k = (phi / PI).round();
    (phi - k * PI).abs() < 1e-12
}

/// Compiles a circuit into a pattern of width `2n − 1`, tracking the Pauli
/// frame of every wire symbolically as sets of outcome sites.
pub fn compile_pattern(circuit: &Circuit) -> Result<Pattern> {
    let n = circuit.n_wires();
    let width = 2 * n - 1;
    let mut ops = Vec::new();
    for g in circuit.gates() {
        expand(g, &mut ops)?;
    }
    let plan = plan_columns(n, &ops);
    let depth = plan.len();
    let site = |t: usize, r: usize| t * width + r;

    let mut x: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut z: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut columns = Vec::with_capacity(depth + 1);

    for (t, col) in plan.iter().enumerate() {
        let mut actions = vec![SiteAction::z(); width];
        let bridged = |w: usize| col.bridges.contains(&w) || (w > 0 && col.bridges.contains(&(w - 1)));

        // Z-measured spacers flip the neighbouring wires.
        for w in 0..n {
            for r in [2 * w as isize - 1, 2 * w as isize + 1] {
                if r >= 0 && (r as usize) < width && !col.bridges.contains(&(r as usize / 2)) {
                    toggle(&mut z[w], site(t, r as usize));
                }
            }
        }
        for &a in &col.bridges {
            let r = 2 * a + 1;
            actions[r] = SiteAction::Measure {
                plane: Plane::XY,
                angle: FRAC_PI_2,
                x_domain: vec![],
            };
            let mut eff: BTreeSet<usize> = [site(t, r)].into();
            if t > 0 {
                toggle(&mut eff, site(t - 1, r));
            }
            toggle(&mut eff, site(t + 1, r));
            let (xa, xc) = (x[a].clone(), x[a + 1].clone());
            for w in [a, a + 1] {
                xor_into(&mut z[w], &eff);
                xor_into(&mut z[w], &xa);
                xor_into(&mut z[w], &xc);
            }
        }
        for w in 0..n {
            let angle = col.phis[w] + if bridged(w) { FRAC_PI_2 } else { 0.0 };
            let x_domain = if sign_free(angle) {
                vec![]
            } else {
                x[w].iter().copied().collect()
            };
            actions[2 * w] = SiteAction::Measure {
                plane: Plane::XY,
                angle,
                x_domain,
            };
            let mut next_x = std::mem::take(&mut z[w]);
            toggle(&mut next_x, site(t, 2 * w));
            z[w] = std::mem::replace(&mut x[w], next_x);
        }
        columns.push(actions);
    }

    let mut last = vec![SiteAction::z(); width];
    for w in 0..n {
        last[2 * w] = SiteAction::Output { wire: w };
        for r in [2 * w as isize - 1, 2 * w as isize + 1] {
            if r >= 0 && (r as usize) < width {
                toggle(&mut z[w], site(depth, r as usize));
            }
        }
    }
    columns.push(last);

    let pattern = Pattern {
        width,
        n_wires: n,
        columns,
        x_correction: x.into_iter().map(|s| s.into_iter().collect()).collect(),
        z_correction: z.into_iter().map(|s| s.into_iter().collect()).collect(),
    };
    pattern.validate()?;
    Ok(pattern)
}
