//! PL Morse data: lower stars, Morse complexes and the Morse filtration.

use num_rational::BigRational;

use crate::cellsp::{closed_filtration_witness, is_open, CellComplex, CellSet, ClosedFiltrationWitness, Partition};
use crate::error::{Error, Result};
use crate::exactlin::{BoundedComplex, Scalar};
use crate::sheaf::{sections::regrouping_sign_for, sections_complex, CellularSheaf};

/// Injective rational values on the vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    values: Vec<BigRational>,
}

impl PLFunction {
    pub fn new(x: &CellComplex, values: Vec<BigRational>) -> Result<Self> {
        if values.len() != x.vertex_count() {
            return Err(Error::InvalidFunction(format!("{} values for {} vertices", values.len(), x.vertex_count())));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].cmp(&values[b]));
        for w in order.windows(2) {
            if values[w[0]] == values[w[1]] {
                return Err(Error::NonGeneric(w[0].min(w[1]), w[0].max(w[1])));
            }
        }
        Ok(PLFunction { values })
    }

    pub fn from_i64(x: &CellComplex, values: &[i64]) -> Result<Self> {
        Self::new(x, values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn value(&self, v: usize) -> &BigRational {
        &self.values[v]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Vertices sorted by increasing value.
    pub fn vertex_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.values[a].cmp(&self.values[b]));
        order
    }

    /// The vertex of `cell` with the largest value.
    pub fn argmax(&self, cell: &[usize]) -> usize {
        *cell.iter().max_by(|&&a, &&b| self.values[a].cmp(&self.values[b])).expect("cells are nonempty")
    }
}

/// Cells whose `f`-maximal vertex is `v`.
pub fn lower_star(x: &CellComplex, f: &PLFunction, v: usize) -> CellSet {
    (0..x.len()).filter(|&c| f.argmax(x.cell(c)) == v).collect()
}

/// Local Morse data at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseDatum {
    pub vertex: usize,
    pub lower_star: CellSet,
    pub complex: BoundedComplex,
    pub euler: i64,
}

pub fn morse_complex(x: &CellComplex, sheaf: &CellularSheaf, f: &PLFunction, v: usize) -> Result<MorseDatum> {
    if v >= x.vertex_count() {
        return Err(Error::InvalidFunction(format!("vertex {v} out of range")));
    }
    let lower_star = lower_star(x, f, v);
    let complex = sections_complex(x, sheaf, &lower_star)?;
    let euler = complex.euler_characteristic();
    Ok(MorseDatum { vertex: v, lower_star, complex, euler })
}

/// Lower stars in increasing order of `f`, with their closed-filtration
/// witness and the chain-level regrouping sign `det C(X) ≅ ⊗_v det M_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseFiltration {
    pub data: Vec<MorseDatum>,
    pub partition: Partition,
    pub witness: ClosedFiltrationWitness,
    pub sign: Scalar,
}

impl MorseFiltration {
    /// `Σ_v χ(M_v)`.
    pub fn index(&self) -> i64 {
        self.data.iter().map(|d| d.euler).sum()
    }
}

pub fn morse_filtration(x: &CellComplex, sheaf: &CellularSheaf, f: &PLFunction) -> Result<MorseFiltration> {
    let data = f.vertex_order().into_iter().map(|v| morse_complex(x, sheaf, f, v)).collect::<Result<Vec<_>>>()?;
    let parts: Vec<CellSet> = data.iter().map(|d| d.lower_star.clone()).collect();
    let partition = Partition::of(x, &CellSet::all(x), parts)?;
    let witness = closed_filtration_witness(x, &partition)?;
    let sign = regrouping_sign_for(x, sheaf, partition.ambient(), partition.parts())?;
    Ok(MorseFiltration { data, partition, witness, sign })
}

/// Sections on `W = X \ (U ∪ V)` for disjoint open `U`, `V`.
pub fn morse_complex_uv(x: &CellComplex, sheaf: &CellularSheaf, u: &CellSet, v: &CellSet) -> Result<BoundedComplex> {
    if !is_open(x, u) || !is_open(x, v) {
        return Err(Error::InvalidOpenPair("U and V must be open".into()));
    }
    if !u.is_disjoint(v) {
        return Err(Error::InvalidOpenPair("U and V must be disjoint".into()));
    }
    let w = CellSet::all(x).difference(&u.union(v));
    sections_complex(x, sheaf, &w)
}
