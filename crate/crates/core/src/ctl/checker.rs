use std::collections::VecDeque;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{parse_ctl, CtlFormula};
use crate::error::{Error, Result};
use crate::transition::TransitionSystem;

/// Explicit-state view of a transition system for model checking.
///
/// Atom `p<id>` holds exactly at the state labelled `id`. The successor
/// relation is total: a state without successors gets a stutter self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kripke {
    ids: Vec<usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    stuttered: Vec<bool>,
}

impl Kripke {
    /// `edges[i]` lists successor indices of state `i`.
    pub fn new(ids: Vec<usize>, edges: Vec<Vec<usize>>) -> Result<Self> {
        let n = ids.len();
        if edges.len() != n {
            return Err(Error::dims("successor lists", n, edges.len()));
        }
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("state ids must be unique".into()));
        }
        let mut succ = Vec::with_capacity(n);
        let mut stuttered = vec![false; n];
        for (i, out) in edges.into_iter().enumerate() {
            let mut out = out;
            if let Some(&bad) = out.iter().find(|&&j| j >= n) {
                return Err(Error::Validation(format!("edge {i} -> {bad} points past {n} states")));
            }
            out.sort_unstable();
            out.dedup();
            if out.is_empty() {
                out.push(i);
                stuttered[i] = true;
            }
            succ.push(out);
        }
        let mut pred = vec![Vec::new(); n];
        for (i, out) in succ.iter().enumerate() {
            for &j in out {
                pred[j].push(i);
            }
        }
        Ok(Self {
            ids,
            succ,
            pred,
            stuttered,
        })
    }

    /// States are the partitions in order; with exit flags an extra `out`
    /// sink with id 0 is appended.
    pub fn from_system(ts: &TransitionSystem) -> Result<Self> {
        let n = ts.len();
        let mut ids: Vec<usize> = ts.partition_set().ids().collect();
        let mut edges: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| ts.transitions().get(i, j)).collect())
            .collect();
        if let Some(exits) = ts.exits() {
            if ids.contains(&0) {
                return Err(Error::Validation("partition id 0 is reserved for the out sink".into()));
            }
            for (i, &e) in exits.iter().enumerate() {
                if e {
                    edges[i].push(n);
                }
            }
            ids.push(0);
            edges.push(Vec::new());
        }
        Self::new(ids, edges)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn is_stuttered(&self, i: usize) -> bool {
        self.stuttered[i]
    }

    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Satisfaction set of `f`, indexed by state.
    pub fn sat(&self, f: &CtlFormula) -> Result<Vec<bool>> {
        Ok(self.sat_counting(f)?.0)
    }

    /// Satisfaction set plus the largest number of productive iterations
    /// any single fixpoint needed.
    pub fn sat_counting(&self, f: &CtlFormula) -> Result<(Vec<bool>, usize)> {
        self.resolve_atoms(f)?;
        let mut ev = Eval { k: self, max_iter: 0 };
        let s = ev.sat(f);
        Ok((s, ev.max_iter))
    }

    fn resolve_atoms(&self, f: &CtlFormula) -> Result<()> {
        match f.atoms().into_iter().find(|&a| self.index_of(a).is_none()) {
            Some(a) => Err(Error::UnknownAtom(a)),
            None => Ok(()),
        }
    }

    fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(i) = stack.pop() {
            for &j in &self.succ[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// Shortest path from `s` through `through` states to a `target` state.
    fn path_to(&self, s: usize, through: &[bool], target: &[bool]) -> Option<Vec<usize>> {
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([s]);
        parent[s] = s;
        while let Some(i) = queue.pop_front() {
            if target[i] {
                let mut path = vec![i];
                let mut cur = i;
                while cur != s {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            if !through[i] {
                continue;
            }
            for &j in &self.succ[i] {
                if parent[j] == usize::MAX {
                    parent[j] = i;
                    queue.push_back(j);
                }
            }
        }
        None
    }

    /// Lasso from `s` staying inside `set`, which must be closed under
    /// "has a successor in `set`". Returns the path and the loop entry
    /// position; the last element repeats the entry state.
    fn lasso_in(&self, s: usize, set: &[bool]) -> (Vec<usize>, usize) {
        let mut pos = vec![usize::MAX; self.len()];
        let mut path = vec![s];
        pos[s] = 0;
        let mut cur = s;
        loop {
            let next = *self.succ[cur]
                .iter()
                .find(|&&j| set[j])
                .expect("state in an EG set has a successor in the set");
            path.push(next);
            if pos[next] != usize::MAX {
                return (path, pos[next]);
            }
            pos[next] = path.len() - 1;
            cur = next;
        }
    }
}

struct Eval<'a> {
    k: &'a Kripke,
    max_iter: usize,
}

impl Eval<'_> {
    fn sat(&mut self, f: &CtlFormula) -> Vec<bool> {
        use CtlFormula::*;
        let n = self.k.len();
        match f {
            True => vec![true; n],
            False => vec![false; n],
            Atom(id) => self.k.ids.iter().map(|x| x == id).collect(),
            Not(a) => self.sat(a).iter().map(|v| !v).collect(),
            And(a, b) => zip(&self.sat(a), &self.sat(b), |x, y| x && y),
            Or(a, b) => zip(&self.sat(a), &self.sat(b), |x, y| x || y),
            Implies(a, b) => zip(&self.sat(a), &self.sat(b), |x, y| !x || y),
            EX(a) => {
                let s = self.sat(a);
                self.pre_exists(&s)
            }
            AX(a) => {
                let s = self.sat(a);
                self.pre_forall(&s)
            }
            EF(a) => {
                let s = self.sat(a);
                self.eu(&vec![true; n], &s)
            }
            AF(a) => {
                let s = self.sat(a);
                self.au(&vec![true; n], &s)
            }
            EG(a) => {
                let s = self.sat(a);
                self.eg(&s)
            }
            AG(a) => {
                let s = self.sat(a);
                self.ag(&s)
            }
            EU(a, b) => {
                let (sa, sb) = (self.sat(a), self.sat(b));
                self.eu(&sa, &sb)
            }
            AU(a, b) => {
                let (sa, sb) = (self.sat(a), self.sat(b));
                self.au(&sa, &sb)
            }
        }
    }

    fn pre_exists(&self, z: &[bool]) -> Vec<bool> {
        self.k.succ.iter().map(|out| out.iter().any(|&j| z[j])).collect()
    }

    fn pre_forall(&self, z: &[bool]) -> Vec<bool> {
        self.k.succ.iter().map(|out| out.iter().all(|&j| z[j])).collect()
    }

    fn fixpoint(&mut self, start: Vec<bool>, step: impl Fn(&Self, &[bool]) -> Vec<bool>) -> Vec<bool> {
        let mut z = start;
        let mut iters = 0;
        loop {
            let next = step(self, &z);
            if next == z {
                break;
            }
            z = next;
            iters += 1;
        }
        self.max_iter = self.max_iter.max(iters);
        z
    }

    // μZ. b ∨ (a ∧ EX Z)
    fn eu(&mut self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fixpoint(b.to_vec(), |ev, z| {
            let pre = ev.pre_exists(z);
            (0..z.len()).map(|i| z[i] || (a[i] && pre[i])).collect()
        })
    }

    // μZ. b ∨ (a ∧ AX Z)
    fn au(&mut self, a: &[bool], b: &[bool]) -> Vec<bool> {
        self.fixpoint(b.to_vec(), |ev, z| {
            let pre = ev.pre_forall(z);
            (0..z.len()).map(|i| z[i] || (a[i] && pre[i])).collect()
        })
    }

    // νZ. a ∧ EX Z
    fn eg(&mut self, a: &[bool]) -> Vec<bool> {
        self.fixpoint(a.to_vec(), |ev, z| {
            let pre = ev.pre_exists(z);
            (0..z.len()).map(|i| z[i] && pre[i]).collect()
        })
    }

    // νZ. a ∧ AX Z
    fn ag(&mut self, a: &[bool]) -> Vec<bool> {
        self.fixpoint(a.to_vec(), |ev, z| {
            let pre = ev.pre_forall(z);
            (0..z.len()).map(|i| z[i] && pre[i]).collect()
        })
    }
}

fn zip(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

fn not(a: &[bool]) -> Vec<bool> {
    a.iter().map(|v| !v).collect()
}

/// Result of checking one formula at one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub holds: bool,
    /// State ids of a witness (true existential) or counterexample (false
    /// universal). A lasso repeats its loop-entry state at the end. Empty
    /// when the formula shape has no path evidence.
    pub witness: Vec<usize>,
    /// Position in `witness` where the cycle of a lasso begins.
    pub loop_start: Option<usize>,
    /// A stutter self-loop is reachable from the initial state, so the
    /// verdict may rely on a deadlock having been made total.
    pub stutter_dependent: bool,
}

/// Checks `f` at the state labelled `initial`.
pub fn check_kripke(k: &Kripke, f: &CtlFormula, initial: usize) -> Result<Outcome> {
    let s = k
        .index_of(initial)
        .ok_or_else(|| Error::InvalidArgument(format!("initial partition {initial} does not exist")))?;
    let holds = k.sat(f)?[s];
    let (path, loop_start) = evidence(k, f, s, holds).unwrap_or_default();
    let stutter_dependent = k.reachable_from(s).iter().enumerate().any(|(i, &r)| r && k.stuttered[i]);
    Ok(Outcome {
        holds,
        witness: path.into_iter().map(|i| k.ids[i]).collect(),
        loop_start,
        stutter_dependent,
    })
}

fn evidence(k: &Kripke, f: &CtlFormula, s: usize, holds: bool) -> Option<(Vec<usize>, Option<usize>)> {
    use CtlFormula::*;
    let n = k.len();
    let sat = |g: &CtlFormula| k.sat(g).expect("atoms resolved before evidence");
    let path = |through: &[bool], target: &[bool]| k.path_to(s, through, target).map(|p| (p, None));
    let lasso = |set: &[bool]| {
        let (p, at) = k.lasso_in(s, set);
        Some((p, Some(at)))
    };
    match (f, holds) {
        (Not(a), _) => evidence(k, a, s, !holds),
        (EX(a), true) => {
            let sa = sat(a);
            k.succ[s].iter().find(|&&j| sa[j]).map(|&j| (vec![s, j], None))
        }
        (AX(a), false) => {
            let sa = sat(a);
            k.succ[s].iter().find(|&&j| !sa[j]).map(|&j| (vec![s, j], None))
        }
        (EF(a), true) => path(&vec![true; n], &sat(a)),
        (EU(a, b), true) => path(&sat(a), &sat(b)),
        (AG(a), false) => path(&vec![true; n], &not(&sat(a))),
        (EG(a), true) => lasso(&sat(&CtlFormula::eg((**a).clone()))),
        (AF(a), false) => lasso(&sat(&CtlFormula::eg(CtlFormula::not((**a).clone())))),
        (AU(a, b), false) => {
            let not_b = CtlFormula::not((**b).clone());
            let stuck = CtlFormula::and(CtlFormula::not((**a).clone()), not_b.clone());
            let early = CtlFormula::eu(not_b.clone(), stuck.clone());
            if sat(&early)[s] {
                path(&sat(&not_b), &sat(&stuck))
            } else {
                lasso(&sat(&CtlFormula::eg(not_b)))
            }
        }
        _ => None,
    }
}

/// Checks `f` on the abstraction at the partition with id `initial`.
pub fn check(ts: &TransitionSystem, f: &CtlFormula, initial: usize) -> Result<Outcome> {
    check_kripke(&Kripke::from_system(ts)?, f, initial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub formula: String,
    pub outcome: std::result::Result<Outcome, String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    /// No row failed to parse or check.
    pub fn all_evaluated(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.is_ok())
    }

    pub fn all_true(&self) -> bool {
        self.rows.iter().all(|r| matches!(&r.outcome, Ok(o) if o.holds))
    }

    /// Aligned `formula | verdict | length | witness` table. Verdicts marked
    /// `*` rely on a stutter self-loop.
    pub fn to_table(&self) -> String {
        let width = self.rows.iter().map(|r| r.formula.chars().count()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$} | verdict | length | witness", "formula");
        for r in &self.rows {
            let (verdict, len, witness) = match &r.outcome {
                Ok(o) => (
                    format!("{}{}", o.holds, if o.stutter_dependent { "*" } else { "" }),
                    o.witness.len().to_string(),
                    o.witness.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" -> "),
                ),
                Err(e) => ("error".to_string(), "-".to_string(), e.clone()),
            };
            let _ = writeln!(out, "{:<width$} | {verdict:<7} | {len:<6} | {witness}", r.formula);
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| match &r.outcome {
                    Ok(o) => json!({
                        "formula": r.formula,
                        "verdict": o.holds,
                        "witness": o.witness,
                        "stutter_dependent": o.stutter_dependent,
                    }),
                    Err(e) => json!({
                        "formula": r.formula,
                        "verdict": "error",
                        "witness": [],
                        "message": e,
                    }),
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes")
    }
}

/// Checks every formula; parse and unknown-atom errors are recorded per row.
pub fn check_suite<S: AsRef<str>>(ts: &TransitionSystem, formulas: &[S], initial: usize) -> Result<SuiteReport> {
    let k = Kripke::from_system(ts)?;
    if k.index_of(initial).is_none() {
        return Err(Error::InvalidArgument(format!("initial partition {initial} does not exist")));
    }
    let rows = formulas
        .iter()
        .map(|text| {
            let text = text.as_ref().trim();
            let outcome = parse_ctl(text)
                .map_err(Error::from)
                .and_then(|f| check_kripke(&k, &f, initial))
                .map_err(|e| e.to_string());
            SuiteRow {
                formula: text.to_string(),
                outcome,
            }
        })
        .collect();
    Ok(SuiteReport { rows })
}

/// Formulas from a formula file: one per line, `#` starts a comment.
pub fn formula_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
