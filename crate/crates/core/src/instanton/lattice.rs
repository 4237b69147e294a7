use crate::model::{Boundary, ModelConfig};

/// Nearest-neighbour bond structure of a chain or square lattice.
///
/// Each site i owns the bond to its predecessor (and, in 2D, to the site above),
/// so a periodic two-site chain carries two bonds between sites 0 and 1.
#[derive(Debug, Clone)]
pub struct Lattice {
    bonds: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn new(n_sites: usize, side: usize, dimension: u8, boundary: Boundary) -> Self {
        let mut bonds = Vec::new();
        let periodic = boundary == Boundary::Periodic;
        if dimension == 1 {
            for i in 0..n_sites {
                if i > 0 {
                    bonds.push((i, i - 1));
                } else if periodic {
                    bonds.push((0, n_sites - 1));
                }
            }
        } else {
            for row in 0..side {
                for col in 0..side {
                    let i = row * side + col;
                    if col > 0 {
                        bonds.push((i, i - 1));
                    } else if periodic {
                        bonds.push((i, row * side + side - 1));
                    }
                    if row > 0 {
                        bonds.push((i, i - side));
                    } else if periodic {
                        bonds.push((i, (side - 1) * side + col));
                    }
                }
            }
        }
        let mut adjacency = vec![Vec::new(); n_sites];
        for &(i, j) in &bonds {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        Lattice { bonds, adjacency }
    }

    pub fn from_config(config: &ModelConfig) -> Self {
        Lattice::new(
            config.n_sites(),
            config.side(),
            config.dimension(),
            config.boundary(),
        )
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// Neighbours of `site`, repeated once per bond.
    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    pub fn n_sites(&self) -> usize {
        self.adjacency.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_counts() {
        assert_eq!(Lattice::new(5, 5, 1, Boundary::Periodic).bonds().len(), 5);
        assert_eq!(Lattice::new(5, 5, 1, Boundary::Open).bonds().len(), 4);
        assert_eq!(Lattice::new(16, 4, 2, Boundary::Periodic).bonds().len(), 32);
        assert_eq!(Lattice::new(16, 4, 2, Boundary::Open).bonds().len(), 24);
    }

    #[test]
    fn two_site_ring_has_a_double_bond() {
        let l = Lattice::new(2, 2, 1, Boundary::Periodic);
        assert_eq!(l.neighbors(0), &[1, 1]);
    }
}
