//! Resolution driver. Alternates three kinds of blowups until the residual
//! order vanishes at every examined point: two-curve blowups that make the
//! order finite, preparation moves at the points carrying the maximal
//! order, and combinatorial principalization of the declared ideal. Each
//! blowup is logged, probe points are carried through the tower, and the
//! outcome is a deterministic report with a monomial-generation
//! certificate per final chart.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::poly::rat_frac;
use crate::algebra::{print_poly, Monomial, Order, Polynomial, Rat};
use crate::charts::{Chart, ChartTree};
use crate::error::{Error, Result};
use crate::hp::{hp_certificate, GenKind, HpOutcome};
use crate::ideal::{choose_center, decide_staircase, MonomialIdeal};
use crate::invariants::{d_invariant, rho, to_prelim, to_weierstrass, Weier};
use crate::logfit::{fitting_ideal, log_rank_at_origin};
use crate::prepared::{check_prepared, declared_ideal, iota_of_weier, Iota, PointKind, PreparedCheck};
use crate::scenario::Scenario;

/// Caps and probe settings for the driver.
#[derive(Debug, Clone)]
pub struct Config {
    /// Maximum blowups along any branch within one preparation or
    /// principalization loop.
    pub branch_cap: usize,
    /// Maximum rounds of the three-step loop.
    pub round_cap: usize,
    /// Number of probe points generated when the scenario supplies none.
    pub generated_probes: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            branch_cap: 64,
            round_cap: 16,
            generated_probes: 20,
        }
    }
}

/// One blowup performed by the driver.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub round: usize,
    pub rule: String,
    pub node: usize,
    pub label: String,
    pub center: Vec<String>,
    pub order_before: String,
    pub order_after: Vec<String>,
    pub children: Vec<usize>,
}

/// Residual orders at every examined point: chart origins of the current
/// leaves and the probe points tracked onto them.
struct Survey {
    origins: BTreeMap<usize, Order>,
    probes: BTreeMap<usize, Vec<Order>>,
    max: Order,
    max_origin: Order,
}

/// Mutable driver state: the chart tree, probe points per leaf, and the
/// append-only step log.
pub struct Driver {
    pub tree: ChartTree,
    pub trunc: u64,
    pub config: Config,
    pub probes: BTreeMap<usize, Vec<Vec<Rat>>>,
    pub steps: Vec<StepRecord>,
    round: usize,
}

impl Driver {
    pub fn new(root: Chart, trunc: u64, probes: Vec<Vec<Rat>>, config: Config) -> Driver {
        let mut map = BTreeMap::new();
        if !probes.is_empty() {
            map.insert(0, probes);
        }
        Driver {
            tree: ChartTree::new(root),
            trunc,
            config,
            probes: map,
            steps: Vec::new(),
            round: 0,
        }
    }

    fn survey(&self) -> Result<Survey> {
        let mut origins = BTreeMap::new();
        let mut probes = BTreeMap::new();
        let mut max = Order::Finite(0);
        let mut max_origin = Order::Finite(0);
        for leaf in self.tree.leaves() {
            let chart = &self.tree.node(leaf).chart;
            let r = rho(chart)?;
            origins.insert(leaf, r);
            max = max.max(r);
            max_origin = max_origin.max(r);
            let mut here = Vec::new();
            for point in self.probes.get(&leaf).map_or(&[][..], |v| v) {
                let r = rho(&chart.recenter(point)?)?;
                here.push(r);
                max = max.max(r);
            }
            if !here.is_empty() {
                probes.insert(leaf, here);
            }
        }
        Ok(Survey {
            origins,
            probes,
            max,
            max_origin,
        })
    }

    /// Applies one blowup, moves the probe points into the charts that
    /// contain them, and logs the move.
    fn blow(&mut self, node: usize, center: &[usize], rule: &str) -> Result<Vec<usize>> {
        let (label, center_names, order_before) = {
            let chart = &self.tree.node(node).chart;
            let names = center
                .iter()
                .map(|&i| chart.frame.names[i].clone())
                .collect();
            (chart.label.clone(), names, order_string(rho(chart)?))
        };
        let children = self.tree.apply_blowup(node, center)?;
        self.transfer_probes(node, center, &children);
        let mut order_after = Vec::new();
        for &c in &children {
            order_after.push(order_string(rho(&self.tree.node(c).chart)?));
        }
        self.steps.push(StepRecord {
            round: self.round,
            rule: rule.to_string(),
            node,
            label,
            center: center_names,
            order_before,
            order_after,
            children: children.clone(),
        });
        Ok(children)
    }

    /// A probe with a nonzero coordinate on the center moves into the
    /// chart of the first such coordinate; a probe on the center itself
    /// has a preimage point with the same coordinates in every chart.
    fn transfer_probes(&mut self, node: usize, center: &[usize], children: &[usize]) {
        let Some(points) = self.probes.remove(&node) else {
            return;
        };
        for p in points {
            match center.iter().position(|&c| !p[c].is_zero()) {
                Some(k) => {
                    let c = center[k];
                    let mut q = p.clone();
                    for &i in center {
                        if i != c {
                            q[i] = &p[i] / &p[c];
                        }
                    }
                    self.probes.entry(children[k]).or_default().push(q);
                }
                None => {
                    for &child in children {
                        self.probes.entry(child).or_default().push(p.clone());
                    }
                }
            }
        }
    }

    /// Replaces a leaf chart by its normalized presentation so that later
    /// centers are coordinate subspaces. Probe points only survive this
    /// when the normalization did not change the components.
    fn materialize(&mut self, leaf: usize, weier: &Weier) -> Result<()> {
        let normalized = &weier.prelim.chart;
        let raw = &self.tree.node(leaf).chart;
        if raw.components == normalized.components {
            return Ok(());
        }
        if self.probes.get(&leaf).is_some_and(|v| !v.is_empty()) {
            return Err(Error::Unsupported(format!(
                "probe points at `{}` cannot be carried through the normalizing \
                 coordinate change; drop the probes or supply the chart in normal form",
                raw.label
            )));
        }
        let label = raw.label.clone();
        self.tree.nodes[leaf].chart =
            Chart::new(normalized.frame.clone(), normalized.components.clone(), label);
        Ok(())
    }

    fn iota_at(&self, node: usize) -> Option<usize> {
        let chart = &self.tree.node(node).chart;
        let prelim = to_prelim(chart, self.trunc).ok()?;
        let weier = to_weierstrass(&prelim).ok()?;
        match iota_of_weier(&weier) {
            Ok(Iota::Rounds(r)) => Some(r),
            _ => None,
        }
    }

    /// Blows up two-curves at two-point origins with infinite residual
    /// order until the order is finite at every leaf origin.
    pub fn step1_finite_order(&mut self) -> Result<()> {
        loop {
            let mut target = None;
            for leaf in self.tree.leaves() {
                if rho(&self.tree.node(leaf).chart)? == Order::Infinite {
                    target = Some(leaf);
                    break;
                }
            }
            let Some(leaf) = target else {
                return Ok(());
            };
            let exc = {
                let chart = &self.tree.node(leaf).chart;
                let exc = chart.frame.exceptional_indices();
                if exc.len() != 2 {
                    return Err(Error::Unsupported(format!(
                        "infinite residual order at `{}`, which is not a two-point; \
                         only two-curve blowups are available to reach finiteness",
                        chart.label
                    )));
                }
                exc
            };
            if self.tree.depth(leaf) >= self.config.branch_cap {
                return Err(Error::StepLimit(format!(
                    "finiteness loop exceeded {} blowups at `{}`",
                    self.config.branch_cap,
                    self.tree.node(leaf).chart.label
                )));
            }
            self.blow(leaf, &exc, "finite-order")?;
        }
    }

    /// Prepares every origin carrying the maximal residual order. Each
    /// move must not increase the order, and where the contact rounds are
    /// decidable on both sides of a move that keeps the order, they must
    /// strictly drop.
    pub fn step2_prepare(&mut self) -> Result<()> {
        for _ in 0..self.config.branch_cap {
            let survey = self.survey()?;
            let max = survey.max;
            if max == Order::Infinite || max == Order::Finite(0) {
                return Ok(());
            }
            if survey.max_origin < max {
                return Err(Error::Unsupported(
                    "the maximal residual order is carried by a probe point; \
                     recenter the scenario there"
                        .into(),
                ));
            }
            let mut target = None;
            for (&leaf, &r) in &survey.origins {
                if r != max {
                    continue;
                }
                let chart = self.tree.node(leaf).chart.clone();
                let prelim = to_prelim(&chart, self.trunc)?;
                let weier = to_weierstrass(&prelim)?;
                match check_prepared(&weier) {
                    Ok(PreparedCheck::Prepared(_)) => {}
                    Ok(PreparedCheck::NotPrepared { .. }) | Err(Error::Unsupported(_)) => {
                        target = Some((leaf, weier));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            let Some((leaf, weier)) = target else {
                return Ok(());
            };
            let iota_before = self.iota_at(leaf);
            let exc = self.tree.node(leaf).chart.frame.exceptional_indices();
            let frontier = match exc.len() {
                2 => self.blow(leaf, &exc, "prepare-two-curve")?,
                1 => {
                    let d = weier.d;
                    let mu = weier
                        .prelim
                        .t
                        .iter()
                        .map(|t| t.order())
                        .min()
                        .unwrap_or(Order::Infinite);
                    if mu < Order::Finite(d) {
                        self.contact_move(leaf, &weier)?
                    } else {
                        let center: Vec<usize> =
                            (0..self.tree.node(leaf).chart.n_vars()).collect();
                        self.blow(leaf, &center, "prepare-point")?
                    }
                }
                k => {
                    return Err(Error::Unsupported(format!(
                        "preparation at `{}` needs a one- or two-point origin, \
                         found {k} exceptional coordinates",
                        self.tree.node(leaf).chart.label
                    )))
                }
            };
            self.assert_descent(max, iota_before, &frontier)?;
        }
        Err(Error::StepLimit(self.stall_diagnostic()?))
    }

    /// One-point move when some component order stays below the contact
    /// degree: blow up the origin, then principalize the pulled-back
    /// contact ideal in every child chart. Returns the new leaves.
    pub fn contact_move(&mut self, leaf: usize, weier: &Weier) -> Result<Vec<usize>> {
        let j = crate::prepared::j_ideal(weier)?;
        let center: Vec<usize> = (0..self.tree.node(leaf).chart.n_vars()).collect();
        self.materialize(leaf, weier)?;
        let children = self.blow(leaf, &center, "prepare-point")?;
        let mut frontier = Vec::new();
        for (k, &child) in children.iter().enumerate() {
            let pulled = j.blowup_center_transform(&center, center[k]);
            frontier.extend(self.principalize(child, pulled, None, "contact-principalize")?);
        }
        Ok(frontier)
    }

    fn assert_descent(
        &self,
        order_before: Order,
        iota_before: Option<usize>,
        frontier: &[usize],
    ) -> Result<()> {
        for &node in frontier {
            let chart = &self.tree.node(node).chart;
            let r = rho(chart)?;
            if r > order_before {
                return Err(Error::Internal(format!(
                    "residual order increased from {} to {} at `{}` during preparation",
                    order_string(order_before),
                    order_string(r),
                    chart.label
                )));
            }
            if r == order_before {
                if let (Some(before), Some(after)) = (iota_before, self.iota_at(node)) {
                    if after >= before {
                        return Err(Error::Internal(format!(
                            "contact rounds failed to drop at `{}`: {before} to {after}",
                            chart.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn stall_diagnostic(&self) -> Result<String> {
        let survey = self.survey()?;
        let mut lines = vec![format!(
            "preparation stalled after {} moves; unprepared origins at order {}:",
            self.config.branch_cap,
            order_string(survey.max)
        )];
        for (&leaf, &r) in &survey.origins {
            if r != survey.max {
                continue;
            }
            let label = &self.tree.node(leaf).chart.label;
            let rounds = match self.iota_at(leaf) {
                Some(k) => k.to_string(),
                None => "undecidable".into(),
            };
            lines.push(format!("  `{label}`: order {}, contact rounds {rounds}", order_string(r)));
        }
        Ok(lines.join("\n"))
    }

    /// Principalizes a monomial ideal over the subtree grown from `node`
    /// by combinatorial blowups, transforming the ideal into each chart.
    /// Centers must stay inside the allowed coordinate mask when one is
    /// given. Returns the leaves where the ideal became principal.
    fn principalize(
        &mut self,
        node: usize,
        ideal: MonomialIdeal,
        allowed: Option<&[bool]>,
        rule: &str,
    ) -> Result<Vec<usize>> {
        let base_depth = self.tree.depth(node);
        let mut done = Vec::new();
        let mut work = vec![(node, ideal)];
        while let Some((at, ideal)) = work.pop() {
            let Some((i, j)) = choose_center(&ideal) else {
                done.push(at);
                continue;
            };
            if let Some(mask) = allowed {
                if !mask[i] || !mask[j] {
                    let chart = &self.tree.node(at).chart;
                    return Err(Error::Internal(format!(
                        "principalization center ({}, {}) leaves the declared divisor at `{}`",
                        chart.frame.names[i], chart.frame.names[j], chart.label
                    )));
                }
            }
            if self.tree.depth(at) - base_depth >= self.config.branch_cap {
                return Err(Error::StepLimit(format!(
                    "principalization exceeded {} blowups below `{}`",
                    self.config.branch_cap,
                    self.tree.node(node).chart.label
                )));
            }
            let children = self.blow(at, &[i, j], rule)?;
            for (k, &child) in children.iter().enumerate() {
                let c = [i, j][k];
                work.push((child, ideal.blowup_pair_transform(i, j, c)));
            }
        }
        done.sort_unstable();
        Ok(done)
    }

    /// Principalizes the declared ideal at every prepared origin carrying
    /// the maximal residual order, then checks that the order dropped
    /// below the previous maximum at every preimage point.
    pub fn step3_decrease(&mut self) -> Result<()> {
        let survey = self.survey()?;
        let prev = survey.max;
        match prev {
            Order::Finite(0) => return Ok(()),
            Order::Infinite => {
                return Err(Error::Internal(
                    "declared-divisor step entered with infinite residual order".into(),
                ))
            }
            _ => {}
        }
        if survey.max_origin < prev {
            return Err(Error::Unsupported(
                "the maximal residual order is carried by a probe point; \
                 recenter the scenario there"
                    .into(),
            ));
        }
        let mut targets = Vec::new();
        for (&leaf, &r) in &survey.origins {
            if r != prev {
                continue;
            }
            let chart = self.tree.node(leaf).chart.clone();
            let prelim = to_prelim(&chart, self.trunc)?;
            let weier = to_weierstrass(&prelim)?;
            match check_prepared(&weier)? {
                PreparedCheck::Prepared(prep) => {
                    let class = match prep.kind {
                        PointKind::TwoPoint | PointKind::OnePointNonGeneric => 0usize,
                        PointKind::OnePointGeneric => 1,
                    };
                    targets.push((class, leaf, weier, prep));
                }
                PreparedCheck::NotPrepared { reason } => {
                    return Err(Error::Internal(format!(
                        "declared-divisor step reached an unprepared origin at `{}`: {reason}",
                        chart.label
                    )))
                }
            }
        }
        targets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut processed = Vec::new();
        for (_, leaf, weier, prep) in targets {
            let declared = declared_ideal(&weier, &prep)?;
            if choose_center(&declared.ideal).is_none() {
                return Err(Error::Internal(format!(
                    "declared ideal already principal at positive residual order at `{}`",
                    self.tree.node(leaf).chart.label
                )));
            }
            self.materialize(leaf, &weier)?;
            self.principalize(
                leaf,
                declared.ideal,
                Some(&declared.divisor),
                "declared-principalize",
            )?;
            processed.push(leaf);
        }
        let after = self.survey()?;
        for (&leaf, &r) in &after.origins {
            if !self.descends_from_any(leaf, &processed) {
                continue;
            }
            let probe_max = after
                .probes
                .get(&leaf)
                .and_then(|rs| rs.iter().copied().max())
                .unwrap_or(Order::Finite(0));
            if r >= prev || probe_max >= prev {
                return Err(Error::Internal(format!(
                    "residual order failed to drop below {} at `{}` after the \
                     declared principalization",
                    order_string(prev),
                    self.tree.node(leaf).chart.label
                )));
            }
        }
        Ok(())
    }

    fn descends_from_any(&self, mut node: usize, ancestors: &[usize]) -> bool {
        loop {
            if ancestors.contains(&node) {
                return true;
            }
            match self.tree.node(node).parent {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    /// Runs rounds of the three steps until the residual order vanishes
    /// at every examined point.
    pub fn run(&mut self) -> Result<()> {
        for round in 0..self.config.round_cap {
            self.round = round;
            let survey = self.survey()?;
            if survey.max == Order::Finite(0) {
                return Ok(());
            }
            if survey.origins.values().any(|&r| r == Order::Infinite) {
                self.step1_finite_order()?;
            }
            let survey = self.survey()?;
            if survey.max == Order::Infinite {
                return Err(Error::Unsupported(
                    "infinite residual order persists at a probe point after the \
                     finiteness step"
                        .into(),
                ));
            }
            if survey.max == Order::Finite(0) {
                return Ok(());
            }
            self.step2_prepare()?;
            match self.survey()?.max {
                Order::Finite(0) => return Ok(()),
                Order::Infinite => continue,
                _ => self.step3_decrease()?,
            }
        }
        let survey = self.survey()?;
        if survey.max == Order::Finite(0) {
            Ok(())
        } else {
            Err(Error::StepLimit(format!(
                "residual order is still {} after {} rounds",
                order_string(survey.max),
                self.config.round_cap
            )))
        }
    }

    /// Assembles the report: the step log, the full chart tree, and per
    /// leaf the invariants, probe orders, and the monomial-generation
    /// certificate.
    pub fn report(&self, scenario: &Scenario) -> Result<Report> {
        let root = &self.tree.node(0).chart;
        let names = &root.frame.names;
        let mut tree = Vec::new();
        for (id, node) in self.tree.nodes.iter().enumerate() {
            let chart = &node.chart;
            tree.push(NodeReport {
                id,
                label: chart.label.clone(),
                parent: node.parent,
                center: node.birth.as_ref().map_or(Vec::new(), |b| b.center.clone()),
                chart_variable: node.birth.as_ref().map(|b| b.chart_var.clone()),
                components: chart
                    .components
                    .iter()
                    .map(|p| print_poly(p, &chart.frame.names))
                    .collect(),
                exceptional: chart
                    .frame
                    .names
                    .iter()
                    .zip(&chart.frame.exceptional)
                    .filter(|(_, &e)| e)
                    .map(|(n, _)| n.clone())
                    .collect(),
            });
        }
        let survey = self.survey()?;
        let mut leaves = Vec::new();
        let mut all_certified = true;
        for leaf in self.tree.leaves() {
            let chart = &self.tree.node(leaf).chart;
            let contact_degree = match d_invariant(chart, self.trunc) {
                Ok(d) => Some(order_string(d)),
                Err(_) => None,
            };
            let mut probes = Vec::new();
            if let (Some(points), Some(orders)) =
                (self.probes.get(&leaf), survey.probes.get(&leaf))
            {
                for (point, &r) in points.iter().zip(orders) {
                    probes.push(ProbeReport {
                        point: point.iter().map(Rat::to_string).collect(),
                        residual_order: order_string(r),
                    });
                }
            }
            let certificate = match hp_certificate(chart, self.trunc) {
                Ok(HpOutcome::Certified(cert)) => CertificateReport {
                    certified: true,
                    truncated: cert.truncated,
                    strengthened: cert.strengthened,
                    generators: cert
                        .gens
                        .iter()
                        .map(|g| GenReport {
                            kind: match g.kind {
                                GenKind::Alpha => "exceptional".into(),
                                GenKind::Beta { .. } => "free".into(),
                            },
                            free_variable: match g.kind {
                                GenKind::Alpha => None,
                                GenKind::Beta { free_var } => {
                                    Some(chart.frame.names[free_var].clone())
                                }
                            },
                            monomial: monomial_string(&g.monomial, &chart.frame.names),
                            component: g.component,
                        })
                        .collect(),
                    staircase_exponents: cert
                        .gamma_sums
                        .iter()
                        .map(|m| monomial_string(m, &chart.frame.names))
                        .collect(),
                    failure: None,
                },
                Ok(HpOutcome::Failed { stage, reason }) => {
                    all_certified = false;
                    CertificateReport {
                        certified: false,
                        truncated: false,
                        strengthened: false,
                        generators: Vec::new(),
                        staircase_exponents: Vec::new(),
                        failure: Some(format!("stage {stage}: {reason}")),
                    }
                }
                Err(e) => {
                    all_certified = false;
                    CertificateReport {
                        certified: false,
                        truncated: false,
                        strengthened: false,
                        generators: Vec::new(),
                        staircase_exponents: Vec::new(),
                        failure: Some(e.to_string()),
                    }
                }
            };
            leaves.push(LeafReport {
                id: leaf,
                label: chart.label.clone(),
                log_rank: log_rank_at_origin(chart),
                residual_order: order_string(survey.origins[&leaf]),
                contact_degree,
                probes,
                certificate,
            });
        }
        Ok(Report {
            variables: names
                .iter()
                .zip(&root.frame.exceptional)
                .map(|(n, &e)| VariableReport {
                    name: n.clone(),
                    exceptional: e,
                })
                .collect(),
            components: scenario.components.clone(),
            truncation_degree: self.trunc,
            rounds_used: self
                .steps
                .iter()
                .map(|s| s.round + 1)
                .max()
                .unwrap_or(0),
            blowups: self.steps.len(),
            steps: self.steps.clone(),
            tree,
            leaves,
            final_max_residual_order: order_string(survey.max),
            all_leaves_certified: all_certified,
        })
    }
}

/// Final report of a resolution run. Field order and the ordering of all
/// lists are fixed, so equal scenarios and configurations produce
/// byte-identical serializations.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub variables: Vec<VariableReport>,
    pub components: Vec<String>,
    pub truncation_degree: u64,
    pub rounds_used: usize,
    pub blowups: usize,
    pub steps: Vec<StepRecord>,
    pub tree: Vec<NodeReport>,
    pub leaves: Vec<LeafReport>,
    pub final_max_residual_order: String,
    pub all_leaves_certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariableReport {
    pub name: String,
    pub exceptional: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeReport {
    pub id: usize,
    pub label: String,
    pub parent: Option<usize>,
    pub center: Vec<String>,
    pub chart_variable: Option<String>,
    pub components: Vec<String>,
    pub exceptional: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LeafReport {
    pub id: usize,
    pub label: String,
    pub log_rank: usize,
    pub residual_order: String,
    pub contact_degree: Option<String>,
    pub probes: Vec<ProbeReport>,
    pub certificate: CertificateReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub point: Vec<String>,
    pub residual_order: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub certified: bool,
    pub truncated: bool,
    pub strengthened: bool,
    pub generators: Vec<GenReport>,
    pub staircase_exponents: Vec<String>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenReport {
    pub kind: String,
    pub free_variable: Option<String>,
    pub monomial: String,
    pub component: usize,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Resolves a three-variable scenario: checks that the boundary Fitting
/// ideals are decidable at the origin, runs the three-step loop until the
/// residual order vanishes at every examined point, and reports.
pub fn resolve3d(scenario: &Scenario, config: &Config) -> Result<Report> {
    let root = scenario.root_chart()?;
    validate_for_resolve(&root)?;
    let probes = match scenario.parsed_probes()? {
        Some(p) => p,
        None => generated_probes(&root, config.generated_probes),
    };
    let mut driver = Driver::new(root, scenario.truncation_degree, probes, config.clone());
    driver.run()?;
    driver.report(scenario)
}

fn validate_for_resolve(root: &Chart) -> Result<()> {
    let n = root.n_vars();
    if n != 3 {
        return Err(Error::Unsupported(format!(
            "the resolution driver handles exactly three adapted coordinates, got {n}; \
             the fitting and invariants commands handle other arities"
        )));
    }
    for k in [0, n - 1] {
        let gens = fitting_ideal(root, k)?;
        let Some(stair) = decide_staircase(n, &gens) else {
            return Err(Error::Unsupported(format!(
                "the order-{k} Fitting ideal at the origin is outside the decidable \
                 monomial fragment"
            )));
        };
        if k == 0 && stair.gens().is_empty() {
            return Err(Error::Unsupported(
                "the log Jacobian is degenerate: the full-rank Fitting ideal vanishes, \
                 so the map is nowhere a local isomorphism"
                    .into(),
            ));
        }
        if stair.gens().len() != 1 {
            return Err(Error::Unsupported(format!(
                "the order-{k} Fitting ideal at the origin is not principal; the driver \
                 expects input already brought to that preprocessed form"
            )));
        }
    }
    Ok(())
}

/// Deterministic probe points on the free part of the divisor stratum:
/// exceptional coordinates stay zero, free coordinates get small nonzero
/// rationals from a fixed-seed generator.
fn generated_probes(root: &Chart, count: usize) -> Vec<Vec<Rat>> {
    if root.frame.free_indices().is_empty() {
        return Vec::new();
    }
    let mut state = 0x6a09e667f3bcc909u64;
    let mut out = Vec::new();
    while out.len() < count {
        let mut p = Vec::with_capacity(root.n_vars());
        for i in 0..root.n_vars() {
            if root.frame.exceptional[i] {
                p.push(Rat::zero());
            } else {
                let num = 1 + (splitmix(&mut state) % 5) as i64;
                let den = 1 + (splitmix(&mut state) % 4) as i64;
                let sign = if splitmix(&mut state) % 2 == 0 { 1 } else { -1 };
                p.push(rat_frac(sign * num, den));
            }
        }
        out.push(p);
    }
    out
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn order_string(o: Order) -> String {
    match o {
        Order::Finite(k) => k.to_string(),
        Order::Infinite => "infinity".into(),
    }
}

fn monomial_string(m: &Monomial, names: &[String]) -> String {
    let mut p = Polynomial::zero(names.len());
    p.add_term(m.clone(), Rat::one());
    print_poly(&p, names)
}
