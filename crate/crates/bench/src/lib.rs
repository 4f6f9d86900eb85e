//! Shared fixtures for the solver benchmarks.

use deltashell::ShellLattice;

/// Kronig-Penney lattice with unit period, long enough for every fixture.
pub fn unit_lattice(alpha: f64) -> ShellLattice {
    ShellLattice::periodic(alpha, 1.0, 200.0).expect("valid lattice")
}

/// Truncation radii used across the benches.
pub const RADII: [f64; 3] = [20.5, 40.5, 80.5];
