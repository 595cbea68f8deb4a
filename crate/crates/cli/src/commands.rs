use apntri::checkers::{self, Method, ParamReport, StatusReport};
use apntri::equivalence::{self, DiagWitness, EquivReport, EquivResult, Scope};
use apntri::params::{self, FiberStats, Table1Row};
use apntri::univariate::{self, PolyVariant};
use apntri::{Exec, Fe, Family, FieldCtx};
use serde::Serialize;

use crate::output::{percent, progress, progress_done, Report};
use crate::{
    field, CmdResult, CrossArgs, DiagArgs, Failure, FieldArgs, MatrixArgs, OutputFormat, ScanArgs, Table1Args,
    Table2Args,
};

const EXEC: Exec = Exec::Parallel;

const TABLE1_ROWS: [(u32, u32); 8] = [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (7, 2), (9, 1), (11, 1)];
const TABLE2_ROWS: [(u32, u32); 4] = [(3, 1), (3, 2), (5, 1), (5, 2)];

/// Parameters from `--a`, or every nonzero element in encoding order.
fn params_or_all(ctx: &FieldCtx, given: &[String]) -> Result<Vec<Fe>, Failure> {
    if given.is_empty() {
        return Ok(ctx.nonzero_elements().collect());
    }
    let mut out = Vec::with_capacity(given.len());
    for s in given {
        let a = ctx.parse_elem(s)?;
        if a.is_zero() {
            return Err(Failure::Usage("parameter a must be nonzero".into()));
        }
        out.push(a);
    }
    Ok(out)
}

fn field_for(m: u32, i: u32) -> Result<FieldCtx, Failure> {
    field(&FieldArgs { m, i, modulus: None })
}

#[derive(Serialize)]
struct FieldInfo {
    m: u32,
    i: u32,
    q: u64,
    modulus: String,
}

impl FieldInfo {
    fn of(ctx: &FieldCtx) -> Self {
        FieldInfo {
            m: ctx.m(),
            i: ctx.i(),
            q: ctx.q(),
            modulus: ctx.modulus_hex(),
        }
    }
}

#[derive(Serialize)]
struct FamilySummary {
    family: Family,
    rows: usize,
    permutations: usize,
    apn: usize,
    criterion_good: usize,
    agree: usize,
    correlation: String,
}

impl FamilySummary {
    fn line(&self) -> String {
        format!(
            "{}: permutations {}/{}, APN {}/{}, criterion-good {}/{}, correlation {}",
            self.family,
            self.permutations,
            self.rows,
            self.apn,
            self.rows,
            self.criterion_good,
            self.rows,
            self.correlation
        )
    }
}

#[derive(Serialize)]
struct ScanDoc<'a> {
    field: FieldInfo,
    method: Method,
    rows: &'a [ParamReport],
    summary: &'a [FamilySummary],
}

pub fn scan(args: &ScanArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(&args.field)?;
    let alist = params_or_all(&ctx, &args.a)?;
    let method: Method = args.method.into();
    let fams = args.family.families();
    let mut rows = Vec::with_capacity(alist.len() * fams.len());
    for (k, &a) in alist.iter().enumerate() {
        progress(|| format!("scan m={} i={}: {}/{}", ctx.m(), ctx.i(), k + 1, alist.len()));
        for &fam in fams {
            rows.push(checkers::param_report(&ctx, fam, a, method, EXEC)?);
        }
    }
    progress_done();
    let summary: Vec<FamilySummary> = fams
        .iter()
        .map(|&fam| {
            let fr: Vec<&ParamReport> = rows.iter().filter(|r| r.family == fam).collect();
            let agree = fr.iter().filter(|r| r.correlated()).count();
            FamilySummary {
                family: fam,
                rows: fr.len(),
                permutations: fr.iter().filter(|r| r.is_permutation).count(),
                apn: fr.iter().filter(|r| r.is_apn).count(),
                criterion_good: fr.iter().filter(|r| r.criterion_good).count(),
                agree,
                correlation: percent(agree, fr.len()),
            }
        })
        .collect();
    let doc = ScanDoc {
        field: FieldInfo::of(&ctx),
        method: method.resolve(ctx.m()),
        rows: &rows,
        summary: &summary,
    };
    Report {
        header: ParamReport::CSV_HEADER,
        rows: rows.iter().map(ParamReport::csv_row).collect(),
        json: &doc,
        summary: summary.iter().map(FamilySummary::line).collect(),
    }
    .emit(fmt);
    match rows.iter().find(|r| !r.correlated()) {
        Some(r) => Err(Failure::Mismatch(format!(
            "criterion, permutation and APN verdicts disagree: {}",
            r.csv_row()
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct CheckDoc<'a> {
    field: FieldInfo,
    rows: &'a [StatusReport],
}

pub fn check(args: &ScanArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(&args.field)?;
    let alist = params_or_all(&ctx, &args.a)?;
    let method: Method = args.method.into();
    let mut rows = Vec::new();
    for (k, &a) in alist.iter().enumerate() {
        progress(|| format!("check m={} i={}: {}/{}", ctx.m(), ctx.i(), k + 1, alist.len()));
        for &fam in args.family.families() {
            rows.push(checkers::check_status(&ctx, fam, a, method, EXEC)?);
        }
    }
    progress_done();
    let doc = CheckDoc {
        field: FieldInfo::of(&ctx),
        rows: &rows,
    };
    Report {
        header: StatusReport::CSV_HEADER,
        rows: rows.iter().map(StatusReport::csv_row).collect(),
        json: &doc,
        summary: Vec::new(),
    }
    .emit(fmt);
    match rows.iter().find(|r| r.is_permutation != r.is_apn) {
        Some(r) => Err(Failure::Mismatch(format!(
            "permutation and APN verdicts disagree: {}",
            r.csv_row()
        ))),
        None => Ok(()),
    }
}

pub fn table1(args: &Table1Args, fmt: OutputFormat) -> CmdResult {
    let cells: Vec<(u32, u32)> = match (args.m, args.i) {
        (Some(m), Some(i)) => vec![(m, i)],
        _ => TABLE1_ROWS.to_vec(),
    };
    let mut rows: Vec<Table1Row> = Vec::new();
    let mut mismatch = None;
    for (m, i) in cells {
        progress(|| format!("table1 m={m} i={i}"));
        let ctx = field_for(m, i)?;
        let scan = params::good_set_rootscan(&ctx, EXEC)?;
        let row = Table1Row {
            m,
            i,
            q: ctx.q(),
            order: ctx.order(),
            good: scan.count,
            a1_good: scan.contains(ctx.one()),
        };
        if m <= 16 {
            let image = params::good_set_gimage(&ctx, EXEC)?;
            if scan.good != image.good && mismatch.is_none() {
                mismatch = Some(format!(
                    "m={m} i={i}: root scan finds {} good parameters, image of g finds {}",
                    scan.count, image.count
                ));
            }
        }
        rows.push(row);
    }
    progress_done();
    Report {
        header: Table1Row::CSV_HEADER,
        rows: rows.iter().map(Table1Row::csv_row).collect(),
        json: &rows,
        summary: Vec::new(),
    }
    .emit(fmt);
    mismatch.map_or(Ok(()), |s| Err(Failure::Mismatch(s)))
}

#[derive(Serialize)]
struct Table2Row {
    m: u32,
    i: u32,
    q: u64,
    order: u64,
    families: Vec<Family>,
    permutations: usize,
    agree: usize,
    checked: usize,
    correlation: String,
}

impl Table2Row {
    const CSV_HEADER: &'static str = "m,i,q,order,permutations,correlation";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}/{},{}",
            self.m, self.i, self.q, self.order, self.permutations, self.order, self.correlation
        )
    }
}

pub fn table2(args: &Table2Args, fmt: OutputFormat) -> CmdResult {
    let cells: Vec<(u32, u32)> = match (args.m, args.i) {
        (Some(m), Some(i)) => vec![(m, i)],
        _ => TABLE2_ROWS.to_vec(),
    };
    let method = match Method::from(args.method) {
        Method::Auto => Method::Image,
        m => m,
    };
    let fams = args.family.families();
    let mut rows = Vec::new();
    let mut mismatch = None;
    for (m, i) in cells {
        let ctx = field_for(m, i)?;
        let mut per_family = Vec::new();
        let mut agree = 0;
        let mut checked = 0;
        for &fam in fams {
            let mut perms = 0;
            for a in ctx.nonzero_elements() {
                progress(|| format!("table2 m={m} i={i} {fam} a={a}"));
                let s = checkers::check_status(&ctx, fam, a, method, EXEC)?;
                let crit = !univariate::has_root(&ctx, fam.criterion_variant(), a, EXEC)?;
                let ok = crit == s.is_permutation && s.is_permutation == s.is_apn;
                if !ok && mismatch.is_none() {
                    mismatch = Some(format!(
                        "m={m} i={i} {fam} a={a}: criterion {crit}, permutation {}, APN {}",
                        s.is_permutation, s.is_apn
                    ));
                }
                agree += ok as usize;
                checked += 1;
                perms += s.is_permutation as usize;
            }
            per_family.push(perms);
        }
        if per_family.windows(2).any(|w| w[0] != w[1]) && mismatch.is_none() {
            mismatch = Some(format!("m={m} i={i}: permutation counts differ between families: {per_family:?}"));
        }
        rows.push(Table2Row {
            m,
            i,
            q: ctx.q(),
            order: ctx.order(),
            families: fams.to_vec(),
            permutations: per_family[0],
            agree,
            checked,
            correlation: percent(agree, checked),
        });
    }
    progress_done();
    Report {
        header: Table2Row::CSV_HEADER,
        rows: rows.iter().map(Table2Row::csv_row).collect(),
        json: &rows,
        summary: vec![format!("method: {method}")],
    }
    .emit(fmt);
    mismatch.map_or(Ok(()), |s| Err(Failure::Mismatch(s)))
}

#[derive(Serialize)]
struct CurveDoc<'a> {
    stats: &'a FiberStats,
    lower_bound_holds: bool,
    max_fiber_within_d: bool,
    partition_identities_hold: bool,
    collision_count_agrees: bool,
    /// Off-diagonal points of the curve equation, when counted.
    gamma_off_diagonal: Option<u64>,
}

pub fn curve(args: &FieldArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(args)?;
    progress(|| format!("curve m={} i={}", ctx.m(), ctx.i()));
    let st = params::fiber_stats(&ctx, EXEC)?;
    progress_done();
    let gamma_off_diagonal = st.gamma_direct.zip(st.gamma_diagonal).map(|(d, g)| d - g);
    let doc = CurveDoc {
        stats: &st,
        lower_bound_holds: st.lower_bound.satisfied_by(st.c0),
        max_fiber_within_d: st.max_fiber as u64 <= st.d,
        partition_identities_hold: st.partition_identities_hold(),
        collision_count_agrees: st.collision_pairs.is_none_or(|c| c == st.gamma_fiber),
        gamma_off_diagonal,
    };
    let opt = |v: Option<u64>| v.map_or_else(|| "not computed".to_string(), |x| x.to_string());
    let summary = vec![
        format!("m={} i={} d={} modulus={}", ctx.m(), ctx.i(), st.d, ctx.modulus_hex()),
        format!("good parameters (empty fibers): {}", st.c0),
        format!(
            "lower bound: {} (ceiling {}), holds: {}",
            st.lower_bound.value_string(3),
            st.lower_bound.ceiling,
            doc.lower_bound_holds
        ),
        format!("max fiber: {} (d = {})", st.max_fiber, st.d),
        format!("collision pairs from fibers: {}", st.gamma_fiber),
        format!("collision pairs by pair scan: {}", opt(st.collision_pairs)),
        format!(
            "curve points: {} total, {} on the diagonal, {} off it",
            opt(st.gamma_direct),
            opt(st.gamma_diagonal),
            opt(gamma_off_diagonal)
        ),
        format!("partition identities hold: {}", doc.partition_identities_hold),
    ];
    Report {
        header: "fiber_size,values",
        rows: st.class_counts.iter().map(|(s, c)| format!("{s},{c}")).collect(),
        json: &doc,
        summary,
    }
    .emit(fmt);
    let failed: Vec<&str> = [
        (doc.lower_bound_holds, "lower bound"),
        (doc.max_fiber_within_d, "max fiber"),
        (doc.partition_identities_hold, "partition identities"),
        (doc.collision_count_agrees, "collision count"),
    ]
    .iter()
    .filter(|(ok, _)| !ok)
    .map(|(_, n)| *n)
    .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("failed: {}", failed.join(", "))))
    }
}

#[derive(Serialize)]
struct MatrixRow {
    a: Fe,
    singular: bool,
    kernel_dim: u32,
    q_has_root: bool,
    agree: bool,
}

impl MatrixRow {
    const CSV_HEADER: &'static str = "a_hex,singular,kernel_dim,q_has_root,agree";

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.a, self.singular, self.kernel_dim, self.q_has_root, self.agree
        )
    }
}

pub fn matrix(args: &MatrixArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(&args.field)?;
    let alist = params_or_all(&ctx, &args.a)?;
    let mut rows = Vec::with_capacity(alist.len());
    for (k, &a) in alist.iter().enumerate() {
        progress(|| format!("matrix m={} i={}: {}/{}", ctx.m(), ctx.i(), k + 1, alist.len()));
        let singular = univariate::companion_product_test(&ctx, a)?;
        let kernel_dim = univariate::linearized_kernel_dim(&ctx, a)?;
        let q_has_root = univariate::has_root(&ctx, PolyVariant::Q, a, EXEC)?;
        rows.push(MatrixRow {
            a,
            singular,
            kernel_dim,
            q_has_root,
            agree: singular == (kernel_dim > 0) && singular == q_has_root,
        });
    }
    progress_done();
    let singular = rows.iter().filter(|r| r.singular).count();
    Report {
        header: MatrixRow::CSV_HEADER,
        rows: rows.iter().map(MatrixRow::csv_row).collect(),
        json: &rows,
        summary: vec![format!("singular: {singular}/{}", rows.len())],
    }
    .emit(fmt);
    match rows.iter().find(|r| !r.agree) {
        Some(r) => Err(Failure::Mismatch(format!(
            "matrix test disagrees with kernel or root count: {}",
            r.csv_row()
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct DiagDoc {
    field: FieldInfo,
    family: Family,
    a: Fe,
    d0: u64,
    criterion: bool,
    /// False when the field is too large for the exhaustive search.
    searched: bool,
    search_witness: Option<DiagWitness>,
    sufficiency_witness: Option<DiagWitness>,
}

fn witness_cell(w: Option<&DiagWitness>) -> String {
    w.map_or_else(String::new, |w| {
        format!("{};{};{};{};{};{}", w.mu, w.nu, w.rho, w.lambda[0], w.lambda[1], w.lambda[2])
    })
}

pub fn diag(args: &DiagArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(&args.field)?;
    let a = params_or_all(&ctx, std::slice::from_ref(&args.a))?[0];
    let family = match args.family {
        crate::FamilyArg::H => Family::H,
        crate::FamilyArg::G => Family::G,
        crate::FamilyArg::Both => return Err(Failure::Usage("equiv diag takes --family g or h".into())),
    };
    let criterion = equivalence::diag_criterion(&ctx, a)?;
    let search_witness = if ctx.m() <= equivalence::SEARCH_MAX_DEGREE {
        progress(|| format!("diagonal search m={} a={a}", ctx.m()));
        let w = equivalence::diag_search(&ctx, family, a, EXEC)?;
        progress_done();
        Some(w)
    } else {
        None
    };
    let sufficiency_witness = equivalence::sufficiency_witness(&ctx, family, a)?;
    let doc = DiagDoc {
        field: FieldInfo::of(&ctx),
        family,
        a,
        d0: equivalence::d0(&ctx),
        criterion,
        searched: search_witness.is_some(),
        search_witness: search_witness.flatten(),
        sufficiency_witness,
    };
    let found = search_witness.map_or_else(|| "not searched".to_string(), |w| w.is_some().to_string());
    let shown = search_witness.flatten().or(sufficiency_witness);
    Report {
        header: "family,a_hex,d0,criterion,search_found,witness",
        rows: vec![format!(
            "{family},{a},{},{criterion},{found},{}",
            doc.d0,
            witness_cell(shown.as_ref())
        )],
        json: &doc,
        summary: Vec::new(),
    }
    .emit(fmt);
    if let Some(w) = search_witness {
        if w.is_some() != criterion {
            return Err(Failure::Mismatch(format!(
                "criterion {criterion} but exhaustive search found a witness: {}",
                w.is_some()
            )));
        }
    }
    if criterion && sufficiency_witness.is_none() {
        return Err(Failure::Mismatch("criterion holds but the explicit scaling fails".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct CrossDoc<'a> {
    field: FieldInfo,
    report: &'a EquivReport,
    scope_label: &'static str,
}

pub fn cross(args: &CrossArgs, fmt: OutputFormat) -> CmdResult {
    let ctx = field(&args.field)?;
    let a = params_or_all(&ctx, std::slice::from_ref(&args.a))?[0];
    let b = params_or_all(&ctx, std::slice::from_ref(&args.b))?[0];
    progress(|| format!("monomial search m={} a={a} b={b}", ctx.m()));
    let rep = equivalence::equiv_report(&ctx, Family::G, a, Family::H, b, args.budget, EXEC)?;
    progress_done();
    let kind = match rep.result {
        EquivResult::Equivalent { .. } => "equivalent",
        EquivResult::Inequivalent => "inequivalent",
        EquivResult::BudgetExceeded => "budget_exceeded",
    };
    let scope: Scope = rep.scope;
    Report {
        header: "a_hex,b_hex,families,result,maps_searched,scope",
        rows: vec![format!(
            "{a},{b},{}-{},{kind},{},{}",
            rep.families.0,
            rep.families.1,
            rep.maps_searched,
            match scope {
                Scope::El => "el",
                Scope::MonomialOnly => "monomial_only",
            }
        )],
        json: &CrossDoc {
            field: FieldInfo::of(&ctx),
            report: &rep,
            scope_label: scope.label(),
        },
        summary: vec![format!("{kind}: {}", scope.label())],
    }
    .emit(fmt);
    match rep.result {
        EquivResult::BudgetExceeded => Err(Failure::Budget(format!(
            "search stopped after {} inner maps",
            rep.maps_searched
        ))),
        _ => Ok(()),
    }
}
