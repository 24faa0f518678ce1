use charge_lab::compactness::UsaVerdict;
use charge_lab::{
    almost_disjoint_family, bounds_mod_finite, cc_predicate, control_measure, find_separating_element, format_rational,
    inner_measure, is_absolutely_continuous, is_singular, lebesgue_decompose, maximal_orthogonal_subfamily,
    parse_rational, psi_functional, quasi_disjoint_census, sandwich, singular_witness_sequence, usa_test,
    weak_compactness_check, AbsoluteContinuity, ChargeFamily, DisjointSeqGen, ElementSequence, EpSet, Error,
    FiniteSubalgebra, Member, Rational, WeakCompactnessVerdict,
};

use crate::error::{CliError, ErrorKind};
use crate::instance::Instance;
use crate::{Args, Report};

type Outcome = Result<(Report, bool), CliError>;

const DEFAULT_SEQ_EVAL: usize = 8;
const WITNESS_PROBES: usize = 100;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::new(ErrorKind::Usage, msg)
}

fn operands<'a>(args: &'a Args, count: usize, shape: &str) -> Result<&'a [String], CliError> {
    if args.operands.len() != count {
        return Err(usage(format!("`{}` expects {shape}", args.command)));
    }
    Ok(&args.operands)
}

fn at_least<'a>(args: &'a Args, count: usize, shape: &str) -> Result<&'a [String], CliError> {
    if args.operands.len() < count {
        return Err(usage(format!("`{}` expects {shape}", args.command)));
    }
    Ok(&args.operands)
}

fn rational_flag(value: &Option<String>, flag: &str) -> Result<Rational, CliError> {
    let v = value.as_ref().ok_or_else(|| usage(format!("missing --{flag} <p/q>")))?;
    parse_rational(v).map_err(|e| CliError::new(ErrorKind::Usage, format!("--{flag}: {e}")))
}

fn r(x: &Rational) -> String {
    format_rational(x)
}

fn braced(s: &EpSet) -> String {
    format!("{{{s}}}")
}

fn sequence_of(inst: &Instance, name: &str) -> Result<ElementSequence, CliError> {
    match inst.sequence(name)?.member() {
        Member::Sequence(s) => Ok(s),
        Member::BranchTail(_) => Err(CliError::new(
            ErrorKind::Computation,
            format!("sequence `{name}` is a branch tail, which this command cannot use"),
        )),
    }
}

fn finite_family(inst: &Instance, name: &str) -> Result<Vec<charge_lab::Charge>, CliError> {
    match inst.family(name)? {
        ChargeFamily::Finite(list) => Ok(list),
        ChargeFamily::PointMasses(_) => {
            Err(CliError::new(ErrorKind::Computation, format!("family `{name}` is not a finite list of charges")))
        }
    }
}

/// Negative verdict: report the failure with its witness, exit 1.
fn negative(mut report: Report, reason: impl ToString) -> Outcome {
    report.push("rejected", reason);
    Ok((report, true))
}

pub(crate) fn dispatch(args: &Args, inst: &Instance) -> Outcome {
    match args.command.as_str() {
        "eval" => eval(args, inst),
        "density" => density(args, inst),
        "ac-check" => ac_check(args, inst),
        "decompose" => decompose(args, inst),
        "control" => control(args, inst),
        "orthogonal" => orthogonal(args, inst),
        "separator" => separator(args, inst),
        "singular-witness" => singular_witness(args, inst),
        "seq-eval" => seq_eval(args, inst),
        "limsup" => limsup(args, inst),
        "quasidisjoint" => quasidisjoint(args, inst),
        "bounds" => bounds(args, inst),
        "sandwich" => sandwich_cmd(args, inst),
        "census" => census(args, inst),
        "cc" => cc(args, inst),
        "inner" => inner(args, inst),
        "psi" => psi(args, inst),
        "usa" => usa(args, inst),
        "wc-check" => wc_check(args, inst),
        other => Err(usage(format!("unknown command `{other}`"))),
    }
}

fn eval(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<charge> <set>")?;
    let value = inst.charge(&ops[0])?.evaluate(inst.set(&ops[1])?)?;
    let mut rep = Report::default();
    rep.push("value", r(&value));
    Ok((rep, false))
}

fn density(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 1, "<set>")?;
    let mut rep = Report::default();
    rep.push("density", r(&inst.set(&ops[0])?.natural_density()?));
    Ok((rep, false))
}

fn ac_check(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<mu> <nu>")?;
    let (mu, nu) = (inst.charge(&ops[0])?, inst.charge(&ops[1])?);
    let mut rep = Report::default();
    match is_absolutely_continuous(mu, nu)? {
        AbsoluteContinuity::Holds => {
            rep.push("absolutely_continuous", true);
            Ok((rep, false))
        }
        AbsoluteContinuity::Fails(w) => {
            rep.push("absolutely_continuous", false);
            rep.push("witness", &w.sequence);
            rep.push("eps", r(&w.eps));
            rep.push("verified", w.verify(mu, nu)?);
            Ok((rep, true))
        }
    }
}

fn decompose(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<mu> <nu>")?;
    let (mu, nu) = (inst.charge(&ops[0])?, inst.charge(&ops[1])?);
    let d = lebesgue_decompose(mu, nu)?;
    let mut rep = Report::default();
    rep.push("absolutely_continuous_part", &d.absolutely_continuous);
    rep.push("singular_part", &d.singular);
    rep.push("witness", braced(&d.witness));
    rep.push("nu_of_witness", r(&nu.evaluate(&d.witness)?));
    rep.push("singular_off_witness", r(&d.singular.evaluate(&d.witness.complement())?));
    rep.push("singular", is_singular(mu, nu)?);
    Ok((rep, false))
}

fn control(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 1, "<family>")?;
    let names = inst.family_members(&ops[0])?;
    let list = finite_family(inst, &ops[0])?;
    let order: Option<Vec<usize>> = args
        .order
        .as_ref()
        .map(|o| {
            o.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|_| usage(format!("--order: invalid index `{x}`"))))
                .collect::<Result<_, _>>()
        })
        .transpose()?;
    let c = control_measure(&list, order.as_deref()).map_err(|e| match e {
        Error::Precondition(m) => usage(format!("--order: {m}")),
        other => other.into(),
    })?;
    let mut rep = Report::default();
    for t in &c.terms {
        rep.push(
            format!("term.{}", t.position),
            format!("member={};coefficient={}", names[t.member], r(&t.coefficient)),
        );
    }
    rep.push("control_measure", &c.measure);
    rep.push("norm", r(&c.measure.norm()));
    Ok((rep, false))
}

fn orthogonal(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 1, "<family>")?;
    let names = inst.family_members(&ops[0])?;
    let list = finite_family(inst, &ops[0])?;
    let chosen = maximal_orthogonal_subfamily(&list)?;
    let mut rep = Report::default();
    rep.push("subfamily", chosen.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(","));
    rep.push("size", chosen.len());
    Ok((rep, false))
}

fn separator(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<charge> <set>…")?;
    let eps = rational_flag(&args.eps, "eps")?;
    let mu = inst.charge(&ops[0])?;
    let gens: Vec<EpSet> = ops[1..].iter().map(|n| inst.set(n).cloned()).collect::<Result<_, _>>()?;
    let algebra = FiniteSubalgebra::generate_in(mu.universe(), &gens)?;
    let heavy = |a: &EpSet| mu.evaluate(a).map(|v| v >= eps).unwrap_or(false);
    let mut rep = Report::default();
    rep.push("algebra_size", algebra.len());
    match find_separating_element(&algebra, heavy, heavy) {
        Ok(i) => {
            rep.push("separator", braced(&algebra.elements()[i]));
            rep.push("atoms", algebra.atom_count(i));
            Ok((rep, false))
        }
        Err(Error::Precondition(m)) => negative(rep, m),
        Err(e) => Err(e.into()),
    }
}

fn singular_witness(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<nu> <family>")?;
    let t = rational_flag(&args.t, "t")?;
    let nu = inst.charge(&ops[0])?;
    let family = inst.family(&ops[1])?;
    let mut rep = Report::default();
    match singular_witness_sequence(nu, &family, &t) {
        Ok(w) => {
            rep.push("sequence", &w.sequence);
            rep.push("nu_limit", r(&w.nu_limit));
            rep.push("nu_norm", r(&nu.norm()));
            rep.push("family_limit", r(&w.family_limit));
            Ok((rep, false))
        }
        Err(Error::NotSingular { member }) => {
            let who = match inst.family_members(&ops[1]) {
                Ok(names) => names[member].clone(),
                Err(_) => format!("point mass at {member}"),
            };
            negative(rep, format!("not singular: {who}"))
        }
        Err(Error::Precondition(m)) => Err(usage(m)),
        Err(e) => Err(e.into()),
    }
}

fn seq_eval(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 1, "<sequence>")?;
    let count = args.k.unwrap_or(DEFAULT_SEQ_EVAL);
    let mut rep = Report::default();
    match inst.sequence(&ops[0])?.member() {
        Member::Sequence(s) => {
            for n in 0..count {
                rep.push(format!("coordinate.{n}"), braced(&s.coordinate(n)?));
            }
            rep.push("decreasing", s.is_decreasing()?);
            rep.push("increasing", s.is_increasing()?);
        }
        Member::BranchTail(b) => {
            for n in 0..count {
                let first: Vec<String> =
                    b.elements_below(1 << 20).into_iter().filter(|&x| x >= n).take(4).map(|x| x.to_string()).collect();
                rep.push(format!("coordinate.{n}"), format!("{b}∩[{n},∞) = {{{},…}}", first.join(",")));
            }
            rep.push("decreasing", true);
            rep.push("increasing", false);
        }
    }
    Ok((rep, false))
}

fn limsup(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<charge> <sequence>")?;
    let m = inst.charge(&ops[0])?;
    let value = inst.sequence(&ops[1])?.member().limsup(m)?;
    let mut rep = Report::default();
    rep.push("limsup", r(&value));
    Ok((rep, false))
}

fn quasidisjoint(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<sequence> <sequence>")?;
    let a = inst.sequence(&ops[0])?.member();
    let b = inst.sequence(&ops[1])?.member();
    let qd = a.quasi_disjoint(&b)?;
    let mut rep = Report::default();
    rep.push("quasi_disjoint", qd);
    if !qd {
        if let (Member::Sequence(x), Member::Sequence(y)) = (&a, &b) {
            rep.push("witness", x.meet(y)?);
        } else {
            rep.push("witness", "the meets are nonempty infinitely often");
        }
    }
    Ok((rep, !qd))
}

fn bounds(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<sequence>…")?;
    let family: Vec<ElementSequence> = ops.iter().map(|n| sequence_of(inst, n)).collect::<Result<_, _>>()?;
    let (upper, lower) = bounds_mod_finite(&family)?;
    let mut rep = Report::default();
    rep.push("upper", upper);
    rep.push("lower", lower);
    Ok((rep, false))
}

fn sandwich_cmd(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 2, "<sequence> <nu>")?;
    let eps = rational_flag(&args.eps, "eps")?;
    let s = sequence_of(inst, &ops[0])?;
    let nu = inst.charge(&ops[1])?;
    let mut rep = Report::default();
    match sandwich(&s, nu, &eps) {
        Ok(out) => {
            rep.push("start", out.start);
            rep.push("lower", &out.lower);
            rep.push("upper", &out.upper);
            rep.push("limsup_lower", r(&charge_lab::limsup_functional(nu, &out.lower)?));
            rep.push("limsup_sequence", r(&charge_lab::limsup_functional(nu, &s)?));
            rep.push("limsup_upper", r(&charge_lab::limsup_functional(nu, &out.upper)?));
            Ok((rep, false))
        }
        Err(Error::RateHypothesis { n, k, mass }) => {
            rep.push("witness", format!("n={n};k={k};mass={mass}"));
            negative(rep, "sequence is not eventually constant for the charge")
        }
        Err(Error::Precondition(m)) => Err(usage(m)),
        Err(e) => Err(e.into()),
    }
}

fn census(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<nu> <sequence>…")?;
    let eps = rational_flag(&args.eps, "eps")?;
    let nu = inst.charge(&ops[0])?;
    let names = &ops[1..];
    let family: Vec<Member> = names.iter().map(|n| inst.sequence(n).map(|e| e.member())).collect::<Result<_, _>>()?;
    let mut rep = Report::default();
    match quasi_disjoint_census(&family, nu, &eps) {
        Ok(c) => {
            for (n, v) in names.iter().zip(&c.values) {
                rep.push(format!("limsup.{n}"), r(v));
            }
            let heavy: Vec<&str> = c.heavy.iter().map(|&i| names[i].as_str()).collect();
            rep.push("heavy", if heavy.is_empty() { "none".to_string() } else { heavy.join(",") });
            rep.push("census_size", c.heavy.len());
            rep.push("bound", &c.bound);
            rep.push("total", r(&c.total));
            rep.push("norm", r(&c.norm));
            Ok((rep, false))
        }
        Err(Error::NotQuasiDisjoint { first, second }) => {
            negative(rep, format!("not quasi-disjoint: {} and {}", names[first], names[second]))
        }
        Err(Error::NotDecreasing { index, previous }) => {
            negative(rep, format!("not decreasing: coordinate {index} is not contained in coordinate {previous}"))
        }
        Err(Error::Precondition(m)) => Err(usage(m)),
        Err(e) => Err(e.into()),
    }
}

fn cc(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<family> <set>…")?;
    let family = inst.family(&ops[0])?;
    let names = &ops[1..];
    let elements: Vec<EpSet> = names.iter().map(|n| inst.set(n).cloned()).collect::<Result<_, _>>()?;
    let mut rep = Report::default();
    match cc_predicate(&elements, &family) {
        Ok(true) => {
            rep.push("cc", true);
            Ok((rep, false))
        }
        Ok(false) => {
            rep.push("cc", false);
            for (n, e) in names.iter().zip(&elements) {
                if family.sup_evaluate(e)? == Rational::from_integer(0.into()) {
                    rep.push("witness", n);
                    break;
                }
            }
            Ok((rep, true))
        }
        Err(Error::Precondition(m)) => Err(CliError::new(ErrorKind::Invariant, m)),
        Err(e) => Err(e.into()),
    }
}

fn inner(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 2, "<charge> <set> <generator set>…")?;
    let m = inst.charge(&ops[0])?;
    let b = inst.set(&ops[1])?;
    let gens: Vec<EpSet> = ops[2..].iter().map(|n| inst.set(n).cloned()).collect::<Result<_, _>>()?;
    let sub = FiniteSubalgebra::generate_in(m.universe(), &gens)?;
    let mut rep = Report::default();
    rep.push("inner_measure", r(&inner_measure(m, b, &sub)?));
    rep.push("outer_value", r(&m.evaluate(b)?));
    Ok((rep, false))
}

fn psi(args: &Args, inst: &Instance) -> Outcome {
    let ops = operands(args, 3, "<family> <generator> <index set>")?;
    let family = inst.family(&ops[0])?;
    let value = psi_functional(&family, inst.generator(&ops[1])?, inst.set(&ops[2])?)?;
    let mut rep = Report::default();
    rep.push("psi", r(&value));
    Ok((rep, false))
}

fn generators_for(args: &Args, inst: &Instance) -> Result<(Vec<String>, Vec<DisjointSeqGen>), CliError> {
    let names: Vec<String> = if args.operands.len() > 1 {
        args.operands[1..].to_vec()
    } else {
        inst.generators.iter().map(|(n, _)| n.clone()).collect()
    };
    let gens = names.iter().map(|n| inst.generator(n).cloned()).collect::<Result<_, _>>()?;
    Ok((names, gens))
}

fn usa(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<family> [<generator>…]")?;
    let family = inst.family(&ops[0])?;
    let (names, gens) = generators_for(args, inst)?;
    let mut rep = Report::default();
    match usa_test(&family, &gens)? {
        UsaVerdict::Pass(c) => {
            rep.push("verdict", "pass");
            for b in &c.bounds {
                rep.push(format!("vanishes_from.{}", names[b.generator]), b.vanishes_from);
            }
            rep.push("rechecked", c.recheck(&family, &gens, WITNESS_PROBES)?);
            Ok((rep, false))
        }
        UsaVerdict::Fail(w) => {
            rep.push("verdict", "fail");
            rep.push("generator", &names[w.generator]);
            rep.push("indices", braced(&w.indices));
            rep.push("eps", r(&w.eps));
            rep.push("verified", w.verify(&family, &gens, WITNESS_PROBES)?);
            Ok((rep, true))
        }
    }
}

fn wc_check(args: &Args, inst: &Instance) -> Outcome {
    let ops = at_least(args, 1, "<family> [<generator>…]")?;
    let family = inst.family(&ops[0])?;
    let (names, gens) = generators_for(args, inst)?;
    let mut rep = Report::default();
    rep.push("norm_bound", r(&family.norm_bound()));
    match weak_compactness_check(&family, &gens)? {
        WeakCompactnessVerdict::NormUnbounded => {
            rep.push("verdict", "norm-unbounded");
            Ok((rep, true))
        }
        WeakCompactnessVerdict::NotUsa(w) => {
            rep.push("verdict", "not-usa");
            rep.push("generator", &names[w.generator]);
            rep.push("indices", braced(&w.indices));
            rep.push("eps", r(&w.eps));
            rep.push("verified", w.verify(&family, &gens, WITNESS_PROBES)?);
            Ok((rep, true))
        }
        WeakCompactnessVerdict::CompatibleWithWeakCompactness(c) => {
            rep.push("verdict", "compatible-with-weak-compactness");
            rep.push("scope", format!("generators {}", names.join(",")));
            rep.push("rechecked", c.recheck(&family, &gens, WITNESS_PROBES)?);
            Ok((rep, false))
        }
    }
}

pub(crate) fn adfamily(args: &Args) -> Outcome {
    let k = args.k.ok_or_else(|| usage("`adfamily` needs --k <int>"))?;
    let fam = almost_disjoint_family(k).map_err(|e| usage(e.to_string()))?;
    let mut rep = Report::default();
    for (i, b) in fam.iter().enumerate() {
        let first: Vec<String> = b.elements_below(1 << 16).into_iter().take(6).map(|x| x.to_string()).collect();
        rep.push(format!("branch.{i}"), format!("{b};first={}", first.join(",")));
    }
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            let size = fam[i].intersection_size(&fam[j]).map_or("infinite".to_string(), |s| s.to_string());
            rep.push(format!("intersection.{i}.{j}"), size);
        }
    }
    Ok((rep, false))
}
