//! Gate-level circuits and their state-vector oracle.

use crate::numerics::register::{apply_pair, apply_single};
use crate::numerics::{gates, C64};
use crate::{Error, Result};

/// Supported gates. `Rot` is `R_z(γ)·R_x(β)·R_z(α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Rot { wire: usize, alpha: f64, beta: f64, gamma: f64 },
    Rz { wire: usize, theta: f64 },
    H { wire: usize },
    Cz { a: usize, b: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rot(wire: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::Rot { wire, alpha, beta, gamma }
    }

    pub fn rz(wire: usize, theta: f64) -> Self {
        Self::Rz { wire, theta }
    }

    pub fn h(wire: usize) -> Self {
        Self::H { wire }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::Cz { a, b }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::Cnot { control, target }
    }

    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Self::Rot { wire, .. } | Self::Rz { wire, .. } | Self::H { wire } => vec![wire],
            Self::Cz { a, b } => vec![a, b],
            Self::Cnot { control, target } => vec![control, target],
        }
    }

    fn angles(&self) -> Vec<f64> {
        match *self {
            Self::Rot { alpha, beta, gamma, .. } => vec![alpha, beta, gamma],
            Self::Rz { theta, .. } => vec![theta],
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_wires: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_wires == 0 {
            return Err(Error::InvalidSiteCount(0));
        }
        for g in &gates {
            let ws = g.wires();
            if let Some(&w) = ws.iter().find(|&&w| w >= n_wires) {
                return Err(Error::WidthExceeded {
                    circuit: w + 1,
                    pattern: n_wires,
                });
            }
            if ws.len() == 2 && ws[0] == ws[1] {
                return Err(Error::UnsupportedGate(format!("{g:?} acts twice on one wire")));
            }
            if g.angles().iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite angle in {g:?}")));
            }
        }
        Ok(Self { n_wires, gates })
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Applies the circuit to an `n_wires`-qubit state; wire 0 is the most
    /// significant qubit.
    pub fn simulate(&self, input: &[C64]) -> Result<Vec<C64>> {
        crate::numerics::register::sites_for_len(input.len(), 2, self.n_wires)?;
        let n = self.n_wires;
        let mut psi = input.to_vec();
        for g in &self.gates {
            match *g {
                Gate::Rot { wire, alpha, beta, gamma } => {
                    let u = &(&gates::rz(gamma) * &gates::rx(beta)) * &gates::rz(alpha);
                    apply_single(&mut psi, 2, n, wire, &u);
                }
                Gate::Rz { wire, theta } => apply_single(&mut psi, 2, n, wire, &gates::rz(theta)),
                Gate::H { wire } => apply_single(&mut psi, 2, n, wire, &gates::hadamard()),
                Gate::Cz { a, b } => apply_pair(&mut psi, 2, n, a, b, &gates::cz()),
                Gate::Cnot { control, target } => {
                    apply_pair(&mut psi, 2, n, control, target, &gates::cnot())
                }
            }
        }
        Ok(psi)
    }
}
