//! Adapted coordinate charts, blowups along coordinate subspaces, and the
//! tree of charts produced by a sequence of blowups.
//!
//! Child charts reuse the parent variable names. In the chart of a center
//! variable `c`, every other center variable `z` pulls back to `z*c`, the
//! chart variable pulls back to itself, and `c` becomes a component of the
//! exceptional divisor.

use num_traits::Zero;

use crate::algebra::poly::Rat;
use crate::algebra::{parse_poly, print_poly, Polynomial};
use crate::error::{Error, Result};

/// Named coordinates with their divisor flags. A variable is exceptional
/// when a divisor component passes through the chart origin along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub names: Vec<String>,
    pub exceptional: Vec<bool>,
}

impl Frame {
    pub fn new(names: Vec<String>, exceptional: Vec<bool>) -> Self {
        assert_eq!(names.len(), exceptional.len());
        Frame { names, exceptional }
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn exceptional_indices(&self) -> Vec<usize> {
        (0..self.n_vars()).filter(|&i| self.exceptional[i]).collect()
    }

    pub fn free_indices(&self) -> Vec<usize> {
        (0..self.n_vars()).filter(|&i| !self.exceptional[i]).collect()
    }

    pub fn free_mask(&self) -> Vec<bool> {
        self.exceptional.iter().map(|&e| !e).collect()
    }

    pub fn parse(&self, input: &str) -> Result<Polynomial> {
        parse_poly(input, &self.names)
    }

    pub fn print(&self, p: &Polynomial) -> String {
        print_poly(p, &self.names)
    }
}

/// A coordinate chart carrying the components of the pulled back morphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub frame: Frame,
    pub components: Vec<Polynomial>,
    pub label: String,
}

impl Chart {
    pub fn new(frame: Frame, components: Vec<Polynomial>, label: impl Into<String>) -> Self {
        let label = label.into();
        for c in &components {
            assert_eq!(c.n_vars(), frame.n_vars());
        }
        Chart {
            frame,
            components,
            label,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.frame.n_vars()
    }

    /// Checks that a prospective center is a list of distinct known
    /// coordinates cutting out a subspace of codimension at least two.
    pub fn validate_center(&self, center: &[usize]) -> Result<()> {
        if center.len() < 2 {
            return Err(Error::Unsupported(
                "a blowup center needs at least two coordinates".into(),
            ));
        }
        let mut seen = vec![false; self.n_vars()];
        for &i in center {
            if i >= self.n_vars() {
                return Err(Error::Internal(format!("center index {i} out of range")));
            }
            if seen[i] {
                return Err(Error::Unsupported(
                    "repeated coordinate in blowup center".into(),
                ));
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// True when the center is combinatorial: every coordinate in it is
    /// a component of the exceptional divisor.
    pub fn center_is_combinatorial(&self, center: &[usize]) -> bool {
        center.iter().all(|&i| self.frame.exceptional[i])
    }

    /// Substitution expressing parent coordinates in the chart of `chart_var`.
    pub fn blowup_substitution(&self, center: &[usize], chart_var: usize) -> Vec<Polynomial> {
        let n = self.n_vars();
        (0..n)
            .map(|i| {
                if i != chart_var && center.contains(&i) {
                    Polynomial::var(n, i).mul(&Polynomial::var(n, chart_var))
                } else {
                    Polynomial::var(n, i)
                }
            })
            .collect()
    }

    /// All charts of the blowup along the center, one per center coordinate,
    /// in center order.
    pub fn blowup(&self, center: &[usize]) -> Result<Vec<Chart>> {
        self.validate_center(center)?;
        let mut out = Vec::with_capacity(center.len());
        for &c in center {
            let subst = self.blowup_substitution(center, c);
            let components = self
                .components
                .iter()
                .map(|p| p.substitute(&subst))
                .collect();
            let mut exceptional = self.frame.exceptional.clone();
            exceptional[c] = true;
            let frame = Frame::new(self.frame.names.clone(), exceptional);
            let label = format!("{}/{}", self.label, self.frame.names[c]);
            out.push(Chart::new(frame, components, label));
        }
        Ok(out)
    }

    /// Moves the origin to `point`. An exceptional coordinate translated by
    /// a nonzero amount loses its flag: that divisor component no longer
    /// passes through the new origin.
    pub fn recenter(&self, point: &[Rat]) -> Result<Chart> {
        if point.len() != self.n_vars() {
            return Err(Error::Arity {
                expected: self.n_vars(),
                got: point.len(),
            });
        }
        let n = self.n_vars();
        let subst: Vec<Polynomial> = point
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Polynomial::var(n, i).add(&Polynomial::constant(n, p.clone()))
            })
            .collect();
        let components = self
            .components
            .iter()
            .map(|p| p.substitute(&subst))
            .collect();
        let exceptional = self
            .frame
            .exceptional
            .iter()
            .zip(point)
            .map(|(&e, p)| e && p.is_zero())
            .collect();
        let frame = Frame::new(self.frame.names.clone(), exceptional);
        Ok(Chart::new(frame, components, self.label.clone()))
    }
}

/// Record of the blowup that created a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Birth {
    pub center: Vec<String>,
    pub chart_var: String,
}

/// One chart in the tree.
#[derive(Debug, Clone)]
pub struct Node {
    pub chart: Chart,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub birth: Option<Birth>,
}

/// Tree of charts rooted at the input chart; blowups append children.
#[derive(Debug, Clone)]
pub struct ChartTree {
    pub nodes: Vec<Node>,
}

impl ChartTree {
    pub fn new(root: Chart) -> Self {
        ChartTree {
            nodes: vec![Node {
                chart: root,
                parent: None,
                children: Vec::new(),
                birth: None,
            }],
        }
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Blows up the chart at `node` along `center` and appends the child
    /// charts; returns their node indices.
    pub fn apply_blowup(&mut self, node: usize, center: &[usize]) -> Result<Vec<usize>> {
        let parent_chart = self.nodes[node].chart.clone();
        let charts = parent_chart.blowup(center)?;
        let center_names: Vec<String> = center
            .iter()
            .map(|&i| parent_chart.frame.names[i].clone())
            .collect();
        let mut ids = Vec::with_capacity(charts.len());
        for (&c, chart) in center.iter().zip(charts) {
            let id = self.nodes.len();
            self.nodes.push(Node {
                chart,
                parent: Some(node),
                children: Vec::new(),
                birth: Some(Birth {
                    center: center_names.clone(),
                    chart_var: parent_chart.frame.names[c].clone(),
                }),
            });
            self.nodes[node].children.push(id);
            ids.push(id);
        }
        Ok(ids)
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].children.is_empty())
            .collect()
    }

    pub fn depth(&self, mut node: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[node].parent {
            node = p;
            d += 1;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::rat_int;
    use num_traits::Zero;

    fn ex1() -> Chart {
        let frame = Frame::new(
            vec!["u".into(), "v".into(), "w".into()],
            vec![true, false, false],
        );
        let components = ["u^2", "u^3*(v^2+u*w)", "u^4*v"]
            .iter()
            .map(|s| parse_poly(s, &frame.names).unwrap())
            .collect();
        Chart::new(frame, components, "root")
    }

    #[test]
    fn blowup_charts_of_a_point_times_line_center() {
        let chart = ex1();
        let kids = chart.blowup(&[0, 1]).unwrap();
        assert_eq!(kids.len(), 2);

        let u_chart = &kids[0];
        assert_eq!(u_chart.label, "root/u");
        assert_eq!(u_chart.frame.exceptional, vec![true, false, false]);
        assert_eq!(u_chart.components[0], u_chart.frame.parse("u^2").unwrap());
        assert_eq!(
            u_chart.components[1],
            u_chart.frame.parse("u^4*(u*v^2+w)").unwrap()
        );
        assert_eq!(u_chart.components[2], u_chart.frame.parse("u^5*v").unwrap());

        let v_chart = &kids[1];
        assert_eq!(v_chart.label, "root/v");
        assert_eq!(v_chart.frame.exceptional, vec![true, true, false]);
        assert_eq!(
            v_chart.components[0],
            v_chart.frame.parse("u^2*v^2").unwrap()
        );
        assert_eq!(
            v_chart.components[1],
            v_chart.frame.parse("u^3*v^4*(v+u*w)").unwrap()
        );
        assert_eq!(
            v_chart.components[2],
            v_chart.frame.parse("u^4*v^5").unwrap()
        );
    }

    #[test]
    fn combinatorial_test_checks_flags() {
        let chart = ex1();
        assert!(!chart.center_is_combinatorial(&[0, 1]));
        let v_chart = chart.blowup(&[0, 1]).unwrap().remove(1);
        assert!(v_chart.center_is_combinatorial(&[0, 1]));
    }

    #[test]
    fn recenter_translates_and_drops_flags() {
        let chart = ex1();
        let moved = chart
            .recenter(&[Rat::zero(), Rat::zero(), rat_int(1)])
            .unwrap();
        assert_eq!(moved.frame.exceptional, vec![true, false, false]);
        assert_eq!(
            moved.components[1],
            moved.frame.parse("u^3*(v^2+u*w+u)").unwrap()
        );

        let off_divisor = chart
            .recenter(&[rat_int(1), Rat::zero(), Rat::zero()])
            .unwrap();
        assert_eq!(off_divisor.frame.exceptional, vec![false, false, false]);
    }

    #[test]
    fn tree_records_births_and_leaves() {
        let mut tree = ChartTree::new(ex1());
        let kids = tree.apply_blowup(0, &[0, 1]).unwrap();
        assert_eq!(kids, vec![1, 2]);
        assert_eq!(tree.leaves(), vec![1, 2]);
        assert_eq!(tree.depth(2), 1);
        let birth = tree.node(2).birth.as_ref().unwrap();
        assert_eq!(birth.center, vec!["u".to_string(), "v".to_string()]);
        assert_eq!(birth.chart_var, "v");
    }

    #[test]
    fn center_validation() {
        let chart = ex1();
        assert!(chart.blowup(&[0]).is_err());
        assert!(chart.blowup(&[0, 0]).is_err());
        assert!(chart.blowup(&[0, 7]).is_err());
    }
}
