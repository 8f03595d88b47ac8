//! Random flat method bodies and an exhaustive optimal assignment between
//! them, computed without the library's mapper.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

const TEMPLATES: [&str; 5] = ["emit", "store", "check", "notify", "update"];
const POOL: [&str; 8] = ["a", "b", "c", "d", "p", "q", "r", "s"];
const SLOTS: usize = 4;
/// Slots that may differ between two related statements: half of the
/// five non-punctuation tokens, rounded down.
const BUDGET: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub template: usize,
    pub args: [&'static str; SLOTS],
}

impl Stmt {
    pub fn source(&self) -> String {
        format!("{}({});", TEMPLATES[self.template], self.args.join(", "))
    }

    /// Positional token differences, the called name included, if within
    /// the replacement budget.
    fn diffs(&self, o: &Stmt) -> Option<usize> {
        let name = usize::from(self.template != o.template);
        let d = name + self.args.iter().zip(&o.args).filter(|(a, b)| a != b).count();
        (d <= BUDGET).then_some(d)
    }
}

fn statement(rng: &mut StdRng) -> Stmt {
    let template = rng.gen_range(0..TEMPLATES.len());
    let mut args = ["a", "b", "c", "d"];
    for _ in 0..rng.gen_range(0..=2) {
        let slot = rng.gen_range(0..SLOTS);
        args[slot] = POOL.choose(rng).copied().expect("pool is not empty");
    }
    Stmt { template, args }
}

pub fn body(rng: &mut StdRng) -> Vec<Stmt> {
    let n = rng.gen_range(1..=8);
    (0..n).map(|_| statement(rng)).collect()
}

pub fn source(body: &[Stmt]) -> String {
    body.iter().map(Stmt::source).collect::<Vec<_>>().join("\n")
}

/// Objective: unmatched statements on both sides, then total differing slots.
pub type Cost = (usize, usize);

pub struct Optimum {
    pub cost: Cost,
    /// Every assignment reaching `cost`, as (left, right) index pairs.
    pub assignments: Vec<Vec<(usize, usize)>>,
}

pub fn brute_force(left: &[Stmt], right: &[Stmt]) -> Optimum {
    struct S<'a> {
        l: &'a [Stmt],
        r: &'a [Stmt],
        used: Vec<bool>,
        cur: Vec<(usize, usize)>,
        best: Option<Optimum>,
    }
    fn rec(s: &mut S<'_>, i: usize, reps: usize) {
        if i == s.l.len() {
            let matched = s.cur.len();
            let cost = (s.l.len() + s.r.len() - 2 * matched, reps);
            match &mut s.best {
                Some(b) if b.cost < cost => {}
                Some(b) if b.cost == cost => b.assignments.push(s.cur.clone()),
                _ => {
                    s.best = Some(Optimum {
                        cost,
                        assignments: vec![s.cur.clone()],
                    })
                }
            }
            return;
        }
        rec(s, i + 1, reps);
        for j in 0..s.r.len() {
            if s.used[j] {
                continue;
            }
            if let Some(d) = s.l[i].diffs(&s.r[j]) {
                s.used[j] = true;
                s.cur.push((i, j));
                rec(s, i + 1, reps + d);
                s.cur.pop();
                s.used[j] = false;
            }
        }
    }
    let mut s = S {
        l: left,
        r: right,
        used: vec![false; right.len()],
        cur: Vec::new(),
        best: None,
    };
    rec(&mut s, 0, 0);
    let mut best = s.best.expect("the empty assignment always exists");
    for a in &mut best.assignments {
        a.sort();
    }
    best
}

/// Maps one random pair with the library and compares it with the
/// exhaustive optimum. Returns whether the optimum was unique.
pub fn compare(left: &[Stmt], right: &[Stmt]) -> Result<bool, String> {
    use blocktrace::srcmodel::{parse_snippet, NodePath};
    use blocktrace::stmtmap::{map_trees, MapConfig};

    let ls = source(left);
    let rs = source(right);
    let lt = parse_snippet(&ls).map_err(|e| e.to_string())?;
    let rt = parse_snippet(&rs).map_err(|e| e.to_string())?;
    let m = map_trees(&lt, &rt, &MapConfig::default()).map_err(|e| e.to_string())?;
    let got: Cost = (m.unmatched_left.len() + m.unmatched_right.len(), m.replacement_count());
    let opt = brute_force(left, right);
    let idx = |p: &NodePath| -> usize {
        assert_eq!(p.0.len(), 1, "flat bodies only");
        p.0[0]
    };
    let mut pairs: Vec<(usize, usize)> = m.mappings.iter().map(|x| (idx(&x.left), idx(&x.right))).collect();
    pairs.sort();
    let ctx = || format!("left:\n{ls}\nright:\n{rs}\nmapper {got:?} {pairs:?}\noptimum {:?} {:?}", opt.cost, opt.assignments);
    if !m.multi.is_empty() {
        return Err(format!("unexpected multi mapping\n{}", ctx()));
    }
    if got != opt.cost {
        return Err(format!("cost differs\n{}", ctx()));
    }
    if !opt.assignments.contains(&pairs) {
        return Err(format!("assignment is not an optimum\n{}", ctx()));
    }
    Ok(opt.assignments.len() == 1)
}

/// Runs `cases` seeded random comparisons: (cases, tie-free cases, failures).
pub fn equivalence(cases: usize, seed: u64) -> (usize, usize, Vec<String>) {
    use rand::SeedableRng;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut unique = 0;
    let mut failures = Vec::new();
    for _ in 0..cases {
        let l = body(&mut rng);
        let r = body(&mut rng);
        match compare(&l, &r) {
            Ok(true) => unique += 1,
            Ok(false) => {}
            Err(e) => failures.push(e),
        }
    }
    (cases, unique, failures)
}
