//! Minimal-cut estimate of the Hartley entropy `S₀` of a final-time interval.
//!
//! Dual lattice: node `(j, τ)` sits at position `j` (between sites `j−1`
//! and `j`; `0` and `L` are the walls under open boundaries) in time slot
//! `τ ∈ 0..=T`. Slot `τ` holds the worldline pieces between gate layer
//! `τ−1` and gate layer `τ`; measurement round `τ−1` sits at the start of
//! slot `τ`.
//!
//! * Horizontal move across site `x` in slot `τ` costs 1, or 0 if `x` was
//!   measured in round `τ−1` (a projected leg carries no entanglement).
//! * Vertical move across gate layer `τ−1` at position `j` is free unless a
//!   gate sits on bond `(j−1, j)`, in which case it is forbidden.
//! * Slot 0 (the product initial state) and, under open boundaries, the
//!   walls are absorbing.
//!
//! For `A = [e₁, e₂)`, `S₀ ≤ min(d(e₁, e₂), d(e₁, ∂) + d(e₂, ∂))`.

use super::{brickwork_bonds, Boundary};
use std::collections::VecDeque;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeLayout {
    pub l: usize,
    pub steps: usize,
    pub boundary: Boundary,
    /// `measured[t][x]`: site `x` measured in round `t`.
    pub measured: Vec<Vec<bool>>,
}

impl SpacetimeLayout {
    pub fn new(l: usize, steps: usize, boundary: Boundary) -> Self {
        Self { l, steps, boundary, measured: vec![vec![false; l]; steps] }
    }

    pub fn set_measured(&mut self, t: usize, x: usize) {
        self.measured[t][x] = true;
    }

    fn gate_on_bond(&self, layer: usize, left: usize) -> bool {
        brickwork_bonds(self.l, layer, self.boundary).iter().any(|&(a, _)| a == left)
    }

    fn npos(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.l + 1,
            Boundary::Periodic => self.l,
        }
    }

    /// 0-1 BFS distances from `(start, T)`; returns (distance to every top node, distance to the boundary).
    fn distances(&self, start: usize) -> (Vec<usize>, usize) {
        let np = self.npos();
        let t_top = self.steps;
        let idx = |j: usize, tau: usize| tau * np + j;
        let inf = usize::MAX;
        let mut dist = vec![inf; np * (t_top + 1)];
        let mut dq = VecDeque::new();
        dist[idx(start, t_top)] = 0;
        dq.push_back((start, t_top));
        let mut boundary = inf;
        let is_wall = |j: usize| self.boundary == Boundary::Open && (j == 0 || j == self.l);
        while let Some((j, tau)) = dq.pop_front() {
            let d = dist[idx(j, tau)];
            if tau == 0 || is_wall(j) {
                boundary = boundary.min(d);
                continue;
            }
            let mut relax = |j2: usize, tau2: usize, w: usize, dq: &mut VecDeque<(usize, usize)>| {
                let k = idx(j2, tau2);
                if d + w < dist[k] {
                    dist[k] = d + w;
                    if w == 0 {
                        dq.push_front((j2, tau2));
                    } else {
                        dq.push_back((j2, tau2));
                    }
                }
            };
            let crossing = |x: usize| if self.measured[tau - 1][x] { 0 } else { 1 };
            // right: cross site j
            if self.boundary == Boundary::Periodic || j < self.l {
                let x = j % self.l;
                relax((j + 1) % np, tau, crossing(x), &mut dq);
            }
            // left: cross site j-1
            if self.boundary == Boundary::Periodic || j > 0 {
                let x = (j + self.l - 1) % self.l;
                relax((j + np - 1) % np, tau, crossing(x), &mut dq);
            }
            // down through layer tau-1
            let left = (j + self.l - 1) % self.l;
            let bond_exists = self.boundary == Boundary::Periodic || (j > 0 && j < self.l);
            if !(bond_exists && self.gate_on_bond(tau - 1, left)) {
                relax(j, tau - 1, 0, &mut dq);
            }
            // up through layer tau
            if tau < t_top && !(bond_exists && self.gate_on_bond(tau, left)) {
                relax(j, tau + 1, 0, &mut dq);
            }
        }
        let top: Vec<usize> = (0..np).map(|j| dist[idx(j, t_top)]).collect();
        (top, boundary)
    }
}

/// Min-cut `S₀` bound (bits) for the final-time interval `A = [e1, e2)` of sites.
pub fn hartley_min_cut(layout: &SpacetimeLayout, e1: usize, e2: usize) -> usize {
    let l = layout.l;
    assert!(e1 <= e2 && e2 <= l, "interval [{e1}, {e2}) outside 0..={l}");
    if e1 == e2 || (e2 - e1 == l) {
        return 0;
    }
    let (p1, p2) = match layout.boundary {
        Boundary::Open => (e1, e2),
        Boundary::Periodic => (e1 % l, e2 % l),
    };
    let (d1, b1) = layout.distances(p1);
    let (_, b2) = layout.distances(p2);
    d1[p2].min(b1.saturating_add(b2))
}
