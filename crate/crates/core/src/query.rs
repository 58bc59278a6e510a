//! Query generation.
//!
//! For every nonempty proper subset `DX_k` of the leading diagnoses, the
//! literals entailed by every `O*_d` with `d ∈ DX_k` (minus those the
//! background already entails) form a candidate query `X_k`. Each remaining
//! diagnosis is then classified: `DX` if `O*_d ⊨ X`, `DNX` if `O*_d ∪ X` is
//! inconsistent, `D∅` otherwise. Candidates with empty `DX` or `DNX` are
//! dropped and duplicates by partition keep the smallest `X`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnosis::{CompiledDpi, Diagnosis};
use crate::dpi::DiagnosisProblem;
use crate::formula::{Formula, Literal};
use crate::reasoner::{FormulaId, Reasoner, ReasonerError};

/// Largest diagnosis set accepted; seeds grow as `2^|D|`.
pub const MAX_DIAGNOSES: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryOptions {
    /// Also use entailed implications `a -> b` between atoms as query material.
    pub implications: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{count} leading diagnoses exceed the supported maximum of {MAX_DIAGNOSES}")]
    TooManyDiagnoses { count: usize },
    #[error("diagnosis {0} leaves an inconsistent knowledge base")]
    NotADiagnosis(Diagnosis),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    Dx,
    Dnx,
    Dz,
}

/// `⟨DX, DNX, D∅⟩` as sorted positions into the diagnosis list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    pub dx: Vec<usize>,
    pub dnx: Vec<usize>,
    pub dz: Vec<usize>,
}

impl Partition {
    pub fn from_blocks(blocks: &[Block]) -> Self {
        let mut p = Partition::default();
        for (i, b) in blocks.iter().enumerate() {
            match b {
                Block::Dx => p.dx.push(i),
                Block::Dnx => p.dnx.push(i),
                Block::Dz => p.dz.push(i),
            }
        }
        p
    }

    /// `(|DX|, |DNX|, |D∅|)`
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.dx.len(), self.dnx.len(), self.dz.len())
    }

    pub fn len(&self) -> usize {
        self.dx.len() + self.dnx.len() + self.dz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_of(&self, i: usize) -> Option<Block> {
        if self.dx.contains(&i) {
            Some(Block::Dx)
        } else if self.dnx.contains(&i) {
            Some(Block::Dnx)
        } else if self.dz.contains(&i) {
            Some(Block::Dz)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    /// Sorted by rendering.
    pub axioms: Vec<Formula>,
    pub partition: Partition,
}

impl Query {
    pub fn new(mut axioms: Vec<Formula>, partition: Partition) -> Self {
        axioms.sort_by_cached_key(ToString::to_string);
        Query { axioms, partition }
    }

    pub fn rendered(&self) -> Vec<String> {
        self.axioms.iter().map(ToString::to_string).collect()
    }
}

pub type QueryCatalog = Vec<Query>;

/// `O*_d = (O \ d) ∪ B ∪ ⋃P`
pub fn o_star(dpi: &DiagnosisProblem, d: &Diagnosis) -> Vec<Formula> {
    let mut out: Vec<Formula> = dpi
        .o
        .formulas()
        .enumerate()
        .filter(|(i, _)| !d.contains(*i))
        .map(|(_, f)| f.clone())
        .collect();
    out.extend(dpi.background().into_iter().cloned());
    out
}

/// Classifies one diagnosis against `x` (interned).
pub fn classify_with(r: &mut Reasoner, c: &CompiledDpi, d: &Diagnosis, x: &[FormulaId]) -> Block {
    let kb = c.o_star(d);
    if x.iter().all(|&f| r.entails_id(&kb, f)) {
        return Block::Dx;
    }
    let mut joint = kb;
    joint.extend_from_slice(x);
    if r.is_consistent(&joint) {
        Block::Dz
    } else {
        Block::Dnx
    }
}

/// Re-derives the partition of `x` over `diagnoses`.
pub fn partition_with(r: &mut Reasoner, c: &CompiledDpi, diagnoses: &[Diagnosis], x: &[FormulaId]) -> Partition {
    let blocks: Vec<Block> = diagnoses.iter().map(|d| classify_with(r, c, d, x)).collect();
    Partition::from_blocks(&blocks)
}

pub fn classify(dpi: &DiagnosisProblem, d: &Diagnosis, x: &[Formula]) -> Block {
    let mut r = Reasoner::new();
    let c = CompiledDpi::new(&mut r, dpi);
    let ids = r.intern_all(x);
    classify_with(&mut r, &c, d, &ids)
}

/// Literals entailed by every `O*_d`, `d ∈ dx`, and not by `B ∪ ⋃P` alone.
pub fn get_entailments(dpi: &DiagnosisProblem, dx: &[Diagnosis]) -> Result<BTreeSet<Literal>, QueryError> {
    let mut r = Reasoner::new();
    let c = CompiledDpi::new(&mut r, dpi);
    let sig = dpi.signature();
    let atoms = || sig.iter().map(String::as_str);
    let background = r.entailed_literals(&c.background, atoms()).unwrap_or_default();
    let mut common: Option<BTreeSet<Literal>> = None;
    for d in dx {
        let ent = r
            .entailed_literals(&c.o_star(d), atoms())
            .map_err(|ReasonerError::Inconsistent| QueryError::NotADiagnosis(d.clone()))?;
        common = Some(match common {
            None => ent,
            Some(acc) => acc.intersection(&ent).cloned().collect(),
        });
    }
    Ok(common.unwrap_or_default().difference(&background).cloned().collect())
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn ones(len: usize) -> Self {
        let mut b = Bits(vec![u64::MAX; len.div_ceil(64)]);
        if !len.is_multiple_of(64) {
            *b.0.last_mut().unwrap() = (1u64 << (len % 64)) - 1;
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn and(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
    }

    fn and_not(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= !b);
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(|&i| self.get(i))
    }
}

/// Candidate query material: literal `2k` is atom `k`, `2k+1` its negation;
/// implications, when enabled, follow.
struct Material {
    atoms: Vec<String>,
    items: Vec<Formula>,
    ids: Vec<FormulaId>,
    implications: Vec<(usize, usize)>,
}

impl Material {
    fn new(r: &mut Reasoner, dpi: &DiagnosisProblem, opts: &QueryOptions) -> Self {
        let atoms: Vec<String> = dpi.signature().into_iter().collect();
        let mut items: Vec<Formula> = Vec::new();
        for a in &atoms {
            items.push(Formula::literal(a.clone(), true));
            items.push(Formula::literal(a.clone(), false));
        }
        let mut implications = Vec::new();
        if opts.implications {
            for a in 0..atoms.len() {
                for b in 0..atoms.len() {
                    if a != b {
                        implications.push((a, b));
                        items.push(Formula::implies(Formula::atom(atoms[a].clone()), Formula::atom(atoms[b].clone())));
                    }
                }
            }
        }
        let ids = r.intern_all(&items);
        Material { atoms, items, ids, implications }
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn complement(&self, item: usize) -> Option<usize> {
        (item < 2 * self.atoms.len()).then_some(item ^ 1)
    }

    fn entailed(&self, r: &mut Reasoner, premises: &[FormulaId]) -> Result<Bits, ReasonerError> {
        let mut bits = Bits::zeros(self.len());
        let lits = r.entailed_literals(premises, self.atoms.iter().map(String::as_str))?;
        for (k, a) in self.atoms.iter().enumerate() {
            if lits.contains(&Literal::new(a.clone(), true)) {
                bits.set(2 * k);
            } else if lits.contains(&Literal::new(a.clone(), false)) {
                bits.set(2 * k + 1);
            }
        }
        // `a -> b` holds iff `premises ∧ a ⊨ b`: one literal sweep per
        // antecedent instead of one entailment test per pair.
        let base = 2 * self.atoms.len();
        let mut extended = premises.to_vec();
        let mut current: Option<(usize, BTreeSet<Literal>)> = None;
        for (j, &(a, b)) in self.implications.iter().enumerate() {
            // Implications already implied by entailed literals add nothing.
            if bits.get(2 * a + 1) || bits.get(2 * b) {
                continue;
            }
            if current.as_ref().is_none_or(|(k, _)| *k != a) {
                extended.truncate(premises.len());
                extended.push(self.ids[2 * a]);
                let under_a = r.entailed_literals(&extended, self.atoms.iter().map(String::as_str)).unwrap_or_default();
                current = Some((a, under_a));
            }
            let (_, under_a) = current.as_ref().expect("set above");
            if under_a.contains(&Literal::new(self.atoms[b].clone(), true)) {
                bits.set(base + j);
            }
        }
        Ok(bits)
    }
}

/// The query catalog over `diagnoses`, sorted by partition.
pub fn generate_queries_with(
    r: &mut Reasoner,
    dpi: &DiagnosisProblem,
    diagnoses: &[Diagnosis],
    opts: &QueryOptions,
) -> Result<QueryCatalog, QueryError> {
    let k = diagnoses.len();
    if k < 2 {
        return Ok(Vec::new());
    }
    if k > MAX_DIAGNOSES {
        return Err(QueryError::TooManyDiagnoses { count: k });
    }
    let c = CompiledDpi::new(r, dpi);
    let material = Material::new(r, dpi, opts);
    let mut stars = Vec::with_capacity(k);
    let mut ent = Vec::with_capacity(k);
    for d in diagnoses {
        let star = c.o_star(d);
        ent.push(material.entailed(r, &star).map_err(|_| QueryError::NotADiagnosis(d.clone()))?);
        stars.push(star);
    }
    let background = material.entailed(r, &c.background).unwrap_or_else(|_| Bits::zeros(material.len()));

    let mut partitions: HashMap<Bits, Partition> = HashMap::new();
    let mut best: BTreeMap<Partition, (usize, Vec<String>, Bits)> = BTreeMap::new();
    for seed in 1..(1u32 << k) - 1 {
        let mut x = Bits::ones(material.len());
        for (i, e) in ent.iter().enumerate() {
            if seed >> i & 1 == 1 {
                x.and(e);
            }
        }
        x.and_not(&background);
        if x.is_zero() {
            continue;
        }
        let partition = match partitions.get(&x) {
            Some(p) => p.clone(),
            None => {
                let items: Vec<usize> = x.ones_iter().collect();
                let blocks: Vec<Block> = (0..k)
                    .map(|i| {
                        if seed >> i & 1 == 1 || x.is_subset(&ent[i]) {
                            return Block::Dx;
                        }
                        if items.iter().any(|&it| material.complement(it).is_some_and(|cmp| ent[i].get(cmp))) {
                            return Block::Dnx;
                        }
                        let mut joint = stars[i].clone();
                        joint.extend(items.iter().map(|&it| material.ids[it]));
                        if r.is_consistent(&joint) {
                            Block::Dz
                        } else {
                            Block::Dnx
                        }
                    })
                    .collect();
                let p = Partition::from_blocks(&blocks);
                partitions.insert(x.clone(), p.clone());
                p
            }
        };
        if partition.dx.is_empty() || partition.dnx.is_empty() {
            continue;
        }
        let mut rendered: Vec<String> = x.ones_iter().map(|it| material.items[it].to_string()).collect();
        rendered.sort();
        let candidate = (rendered.len(), rendered, x);
        match best.get(&partition) {
            Some(current) if (current.0, &current.1) <= (candidate.0, &candidate.1) => {}
            _ => {
                best.insert(partition, candidate);
            }
        }
    }
    Ok(best
        .into_iter()
        .map(|(partition, (_, _, x))| {
            Query::new(x.ones_iter().map(|it| material.items[it].clone()).collect(), partition)
        })
        .collect())
}

/// [`generate_queries_with`] on a fresh reasoner with default options.
pub fn generate_queries(dpi: &DiagnosisProblem, diagnoses: &[Diagnosis]) -> Result<QueryCatalog, QueryError> {
    generate_queries_with(&mut Reasoner::new(), dpi, diagnoses, &QueryOptions::default())
}
