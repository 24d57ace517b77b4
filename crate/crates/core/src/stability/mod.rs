//! Degree-zero homological stability: coinvariants `H_0(G; M)` of automorphism
//! groups of free nilpotent groups acting on polynomial modules, and the maps
//! `H_0(G_r; M_r) -> H_0(G_r; M_{r+1}) -> H_0(G_{r+1}; M_{r+1})`.

mod snf;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use snf::{cokernel, invariant_factors, snf, FinAbJson, FinAbPresentation, SnfResult};

use crate::aut::{Endo, HomMap};
use crate::error::{Error, Result};
use crate::glmod::{eval_module, kernel_homology_module, BasedModule, ModuleSpec};
use crate::json::JsonInt;
use crate::matrix::IntMatrix;
use crate::nilgroup::FreeNilpotentGroup;

/// Elementary matrices `E_ij(1)`, transpositions, and `diag(-1, 1, ..., 1)`.
pub fn gl_generators(r: usize) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if i != j {
                out.push(IntMatrix::elementary(r, i, j, 1));
            }
        }
    }
    for i in 0..r {
        for j in i + 1..r {
            out.push(IntMatrix::transposition(r, i, j));
        }
    }
    let mut d = IntMatrix::identity(r);
    if r > 0 {
        d[(0, 0)] = BigInt::from(-1);
        out.push(d);
    }
    out
}

/// Generators of `Aut(N_r^c)`: lifts of [`gl_generators`] and the kernel
/// automorphisms `sharp(β)` for unit `β` at each class `2..=c`, all lifted to class `c`.
pub fn aut_generators(r: usize, c: usize) -> Result<Vec<Endo>> {
    let base = FreeNilpotentGroup::new(r, 1)?;
    let mut out = Vec::new();
    for a in gl_generators(r) {
        out.push(Endo::from_matrix(&base, &a)?.lift_to(c)?);
    }
    for k in 2..=c {
        for beta in HomMap::standard_basis(r, k)? {
            out.push(beta.sharp()?.lift_to(c)?);
        }
    }
    Ok(out)
}

/// Relation matrix of `H_0`: the columns `(g - I) e_j` followed by `base` (the module's own relations).
pub fn coinvariant_relations(gens: &[IntMatrix], base: &IntMatrix) -> Result<IntMatrix> {
    let k = base.rows();
    let mut columns: Vec<Vec<BigInt>> = Vec::new();
    let id = IntMatrix::identity(k);
    for g in gens {
        if g.shape() != (k, k) {
            return Err(Error::Dimension(format!(
                "{}x{} action on a module of rank {k}",
                g.rows(),
                g.cols()
            )));
        }
        let diff = g - &id;
        for j in 0..k {
            let col = diff.column(j);
            if col.iter().any(|x| x.sign() != num_bigint::Sign::NoSign) && !columns.contains(&col) {
                columns.push(col);
            }
        }
    }
    for j in 0..base.cols() {
        columns.push(base.column(j));
    }
    Ok(IntMatrix::from_columns(k, &columns))
}

/// `Z^k / span{(g - I) v}`.
pub fn coinvariants(gens: &[IntMatrix], k: usize) -> Result<FinAbPresentation> {
    Ok(cokernel(&coinvariant_relations(gens, &IntMatrix::zeros(k, 0))?))
}

/// `true` if `f: Z^s / source -> Z^t / target` (well defined by assumption) is an isomorphism.
///
/// A surjection between isomorphic finitely generated abelian groups is an isomorphism.
pub fn induced_map_is_iso(f: &IntMatrix, source: &IntMatrix, target: &IntMatrix) -> Result<bool> {
    if f.rows() != target.rows() || f.cols() != source.rows() {
        return Err(Error::Dimension("induced map does not match the presentations".into()));
    }
    let surjective = cokernel(&f.hconcat(target)?).is_trivial();
    Ok(surjective && cokernel(source) == cokernel(target))
}

/// The coinvariants at one rank and the relations needed for the maps to the next rank.
struct RankData {
    value: FinAbPresentation,
    relations: IntMatrix,
    /// `H_0(G_r; M_{r+1})` relations and the stabilization matrix, when a next rank exists.
    next: Option<(IntMatrix, IntMatrix)>,
}

fn rank_data(spec: &ModuleSpec, c: usize, r: usize, with_next: bool) -> Result<RankData> {
    let gens = aut_generators(r, c)?;
    let module = eval_module(spec, r)?;
    let actions = restricted(&module, &gens)?;
    let relations = coinvariant_relations(&actions, module.relations())?;
    let next = if with_next {
        let bigger = eval_module(spec, r + 1)?;
        let stabilized: Vec<Endo> = gens.iter().map(Endo::stabilize).collect::<Result<_>>()?;
        let actions = restricted(&bigger, &stabilized)?;
        Some((coinvariant_relations(&actions, bigger.relations())?, module.stab()))
    } else {
        None
    };
    Ok(RankData {
        value: cokernel(&relations),
        relations,
        next,
    })
}

fn restricted(module: &BasedModule, gens: &[Endo]) -> Result<Vec<IntMatrix>> {
    gens.iter()
        .map(|e| module.action(&e.abelianization_matrix()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanEntry {
    pub r: usize,
    pub value: FinAbPresentation,
    /// Whether the composite `H_0(G_r; M_r) -> H_0(G_{r+1}; M_{r+1})` is an isomorphism; `None` at the end of the range.
    pub map_to_next_is_iso: Option<bool>,
    /// The same question for the two factors through `H_0(G_r; M_{r+1})`.
    pub factor_maps_are_iso: Option<(bool, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub spec: ModuleSpec,
    pub class: usize,
    pub entries: Vec<ScanEntry>,
    /// First rank from which every tested composite is an isomorphism.
    pub stabilized_from: Option<usize>,
}

/// One report row in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntryJson {
    pub r: usize,
    pub free_rank: usize,
    pub invariant_factors: Vec<JsonInt>,
    pub map_to_next_is_iso: Option<bool>,
}

impl ScanReport {
    pub fn is_stabilized(&self) -> bool {
        self.stabilized_from.is_some()
    }

    pub fn values(&self) -> Vec<FinAbPresentation> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    pub fn to_json(&self) -> Vec<ScanEntryJson> {
        self.entries
            .iter()
            .map(|e| ScanEntryJson {
                r: e.r,
                free_rank: e.value.free_rank,
                invariant_factors: e.value.invariant_factors.iter().map(JsonInt::from).collect(),
                map_to_next_is_iso: e.map_to_next_is_iso,
            })
            .collect()
    }
}

/// `H_0(Aut(N_r^c); M_r)` for each `r` in `r_min..=r_max`, with the stabilization maps between consecutive ranks.
pub fn stability_scan(spec: &ModuleSpec, c: usize, r_min: usize, r_max: usize) -> Result<ScanReport> {
    if r_min == 0 || r_min > r_max {
        return Err(Error::InvalidArgument(format!("empty rank range {r_min}..={r_max}")));
    }
    if c == 0 {
        return Err(Error::InvalidArgument("class must be at least 1".into()));
    }
    let data: Vec<RankData> = (r_min..=r_max)
        .into_par_iter()
        .map(|r| rank_data(spec, c, r, r < r_max))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(data.len());
    for (i, d) in data.iter().enumerate() {
        let iso = match &d.next {
            None => None,
            Some((mid, stab)) => {
                let target = &data[i + 1].relations;
                let first = induced_map_is_iso(stab, &d.relations, mid)?;
                let second = induced_map_is_iso(&IntMatrix::identity(mid.rows()), mid, target)?;
                let composite = induced_map_is_iso(stab, &d.relations, target)?;
                Some((composite, first, second))
            }
        };
        entries.push(ScanEntry {
            r: r_min + i,
            value: d.value.clone(),
            map_to_next_is_iso: iso.map(|x| x.0),
            factor_maps_are_iso: iso.map(|x| (x.1, x.2)),
        });
    }
    let mut stabilized_from = None;
    for e in entries.iter().rev() {
        match e.map_to_next_is_iso {
            Some(true) => stabilized_from = Some(e.r),
            Some(false) => break,
            None => {}
        }
    }
    Ok(ScanReport {
        spec: spec.clone(),
        class: c,
        entries,
        stabilized_from,
    })
}

/// Rank of `H_t(K; M)` for the free abelian kernel `K = Hom(Z^r, Lie_r^{c+1})`.
pub fn kernel_homology_rank(c: usize, t: usize, m: &ModuleSpec, r: usize) -> Result<BigInt> {
    kernel_homology_module(c, t, m)?.rank_at(r)
}
