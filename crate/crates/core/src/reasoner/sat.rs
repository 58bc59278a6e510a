//! A small DPLL solver with unit propagation.
//!
//! Decisions follow variable order and try `false` first, so results (including
//! the returned model) are a deterministic function of the clause list.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Self {
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

const UNASSIGNED: i8 = -1;

struct Dpll<'a> {
    clauses: &'a [Vec<Lit>],
    occurs: Vec<Vec<u32>>,
    value: Vec<i8>,
    trail: Vec<Lit>,
    qhead: usize,
}

impl Dpll<'_> {
    fn lit_value(&self, l: Lit) -> i8 {
        match self.value[l.var() as usize] {
            UNASSIGNED => UNASSIGNED,
            v if l.is_positive() => v,
            v => 1 - v,
        }
    }

    fn assign(&mut self, l: Lit) {
        self.value[l.var() as usize] = i8::from(l.is_positive());
        self.trail.push(l);
    }

    fn undo_to(&mut self, mark: usize) {
        for l in self.trail.drain(mark..) {
            self.value[l.var() as usize] = UNASSIGNED;
        }
        self.qhead = mark;
    }

    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead].negate();
            self.qhead += 1;
            for k in 0..self.occurs[falsified.code()].len() {
                let clause = &self.clauses[self.occurs[falsified.code()][k] as usize];
                let mut open = None;
                let mut open_count = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.lit_value(l) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        UNASSIGNED => {
                            open_count += 1;
                            open = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => return false,
                    (1, Some(l)) => self.assign(l),
                    _ => {}
                }
            }
        }
        true
    }

    fn search(&mut self, from: usize) -> bool {
        if !self.propagate() {
            return false;
        }
        let Some(var) = (from..self.value.len()).find(|&v| self.value[v] == UNASSIGNED) else {
            return true;
        };
        let mark = self.trail.len();
        for phase in [false, true] {
            self.assign(Lit::new(var as u32, phase));
            if self.search(var + 1) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// Returns a satisfying assignment over `num_vars` variables, or `None`.
pub fn solve(num_vars: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    let mut solver = Dpll {
        clauses,
        occurs: vec![Vec::new(); num_vars * 2],
        value: vec![UNASSIGNED; num_vars],
        trail: Vec::with_capacity(num_vars),
        qhead: 0,
    };
    for (i, clause) in clauses.iter().enumerate() {
        match clause.as_slice() {
            [] => return None,
            [unit] => match solver.lit_value(*unit) {
                0 => return None,
                UNASSIGNED => solver.assign(*unit),
                _ => {}
            },
            _ => {}
        }
        for l in clause {
            solver.occurs[l.code()].push(i as u32);
        }
    }
    if !solver.search(0) {
        return None;
    }
    Some(solver.value.iter().map(|&v| v == 1).collect())
}
