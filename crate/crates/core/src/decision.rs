//! Decision problems under risk: the options × outcomes matrix, the
//! expected-utility criterion and the directed network used by the encoder.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::scalar::{sum, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecisionError {
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(String),
    #[error("probability of outcome {label:?} is {value}, outside [0, 1]")]
    ProbabilityRange { label: String, value: String },
    #[error("decision matrix has no options")]
    EmptyOptions,
    #[error("decision matrix has no outcomes")]
    EmptyOutcomes,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("option {option:?} assigns {found} payoff classes for {expected} outcomes")]
    MissingPayoffClass {
        option: String,
        expected: usize,
        found: usize,
    },
    #[error("favorable utility {favorable} is below unfavorable utility {unfavorable}")]
    InvertedUtilities {
        favorable: String,
        unfavorable: String,
    },
    #[error("only two utility levels (favorable/unfavorable) are supported, got {0}")]
    MultiLevelUtility(usize),
    #[error("option index {index} out of range for {count} options")]
    IndexOutOfRange { index: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PayoffClass {
    Favorable,
    Unfavorable,
}

impl PayoffClass {
    pub fn is_favorable(self) -> bool {
        self == PayoffClass::Favorable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T> {
    pub label: String,
    pub probability: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionOption {
    pub label: String,
    pub payoffs: Vec<PayoffClass>,
}

impl DecisionOption {
    pub fn new(label: impl Into<String>, payoffs: Vec<PayoffClass>) -> Self {
        Self {
            label: label.into(),
            payoffs,
        }
    }

    /// Builds the payoff row from the indices of favorable outcomes.
    pub fn with_favorable(label: impl Into<String>, outcomes: usize, favorable: &[usize]) -> Self {
        let payoffs = (0..outcomes)
            .map(|j| {
                if favorable.contains(&j) {
                    PayoffClass::Favorable
                } else {
                    PayoffClass::Unfavorable
                }
            })
            .collect();
        Self::new(label, payoffs)
    }

    pub fn is_favorable(&self, outcome: usize) -> bool {
        self.payoffs
            .get(outcome)
            .is_some_and(|p| p.is_favorable())
    }
}

/// The two utility levels, `u(favorable)` and `u(unfavorable)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Utilities<T> {
    pub favorable: T,
    pub unfavorable: T,
}

impl<T: Scalar> Utilities<T> {
    pub fn binary() -> Self {
        Self {
            favorable: T::one(),
            unfavorable: T::zero(),
        }
    }

    pub fn value(&self, class: PayoffClass) -> &T {
        match class {
            PayoffClass::Favorable => &self.favorable,
            PayoffClass::Unfavorable => &self.unfavorable,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionMatrix<T> {
    pub outcomes: Vec<Outcome<T>>,
    pub options: Vec<DecisionOption>,
    pub utilities: Utilities<T>,
}

impl<T: Scalar> DecisionMatrix<T> {
    pub fn new(outcomes: Vec<Outcome<T>>, options: Vec<DecisionOption>, utilities: Utilities<T>) -> Self {
        Self {
            outcomes,
            options,
            utilities,
        }
    }

    /// The urn game: 40 red, 30 black and 20 white balls out of 90, three
    /// gambles each paying off on two of the three colours.
    pub fn ball_game() -> Self {
        let outcomes = [("R", 4, 9), ("B", 3, 9), ("W", 2, 9)]
            .into_iter()
            .map(|(label, n, d)| Outcome {
                label: label.to_string(),
                probability: T::from_fraction(n, d),
            })
            .collect();
        let options = vec![
            DecisionOption::with_favorable("option 1", 3, &[0, 1]),
            DecisionOption::with_favorable("option 2", 3, &[0, 2]),
            DecisionOption::with_favorable("option 3", 3, &[1, 2]),
        ];
        Self::new(outcomes, options, Utilities::binary())
    }

    pub fn option_count(&self) -> usize {
        self.options.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.outcomes.iter().map(|o| o.probability.clone()).collect()
    }

    pub fn validate(self) -> Result<Self, DecisionError> {
        validate_matrix(self)
    }

    pub fn expected_utility(&self, option: usize) -> Result<T, DecisionError> {
        expected_utility(self, option)
    }

    pub fn best_options(&self) -> Vec<usize> {
        best_options(self)
    }
}

/// Checks every structural invariant of the matrix and hands it back.
pub fn validate_matrix<T: Scalar>(matrix: DecisionMatrix<T>) -> Result<DecisionMatrix<T>, DecisionError> {
    if matrix.options.is_empty() {
        return Err(DecisionError::EmptyOptions);
    }
    if matrix.outcomes.is_empty() {
        return Err(DecisionError::EmptyOutcomes);
    }

    let mut seen = BTreeSet::new();
    for label in matrix.outcomes.iter().map(|o| &o.label) {
        if !seen.insert(label.clone()) {
            return Err(DecisionError::DuplicateLabel(label.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for label in matrix.options.iter().map(|o| &o.label) {
        if !seen.insert(label.clone()) {
            return Err(DecisionError::DuplicateLabel(label.clone()));
        }
    }

    for outcome in &matrix.outcomes {
        let p = &outcome.probability;
        if *p < T::zero() || *p > T::one() {
            return Err(DecisionError::ProbabilityRange {
                label: outcome.label.clone(),
                value: p.to_fraction_string(),
            });
        }
    }
    let total = sum(&matrix.probabilities());
    if !total.approx_eq(&T::one()) {
        return Err(DecisionError::ProbabilitySum(total.to_fraction_string()));
    }

    for option in &matrix.options {
        if option.payoffs.len() != matrix.outcomes.len() {
            return Err(DecisionError::MissingPayoffClass {
                option: option.label.clone(),
                expected: matrix.outcomes.len(),
                found: option.payoffs.len(),
            });
        }
    }

    // Equal levels are a legal (degenerate) problem; inverted levels are not.
    if matrix.utilities.favorable < matrix.utilities.unfavorable {
        return Err(DecisionError::InvertedUtilities {
            favorable: matrix.utilities.favorable.to_fraction_string(),
            unfavorable: matrix.utilities.unfavorable.to_fraction_string(),
        });
    }
    Ok(matrix)
}

/// `Σ_j P_j · u(x_j)` for one option.
pub fn expected_utility<T: Scalar>(matrix: &DecisionMatrix<T>, option: usize) -> Result<T, DecisionError> {
    let row = matrix
        .options
        .get(option)
        .ok_or(DecisionError::IndexOutOfRange {
            index: option,
            count: matrix.options.len(),
        })?;
    Ok(matrix
        .outcomes
        .iter()
        .zip(&row.payoffs)
        .fold(T::zero(), |acc, (outcome, class)| {
            acc + outcome.probability.clone() * matrix.utilities.value(*class).clone()
        }))
}

/// Indices of every option whose expected utility is maximal, ascending.
pub fn best_options<T: Scalar>(matrix: &DecisionMatrix<T>) -> Vec<usize> {
    let values: Vec<T> = (0..matrix.options.len())
        .map(|i| expected_utility(matrix, i).expect("index in range"))
        .collect();
    argmax_all(&values)
}

/// All indices attaining the maximum (ties compared with [`Scalar::approx_eq`]).
pub fn argmax_all<T: Scalar>(values: &[T]) -> Vec<usize> {
    let Some(best) = values.iter().cloned().reduce(|a, b| if b > a { b } else { a }) else {
        return Vec::new();
    };
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.approx_eq(&best))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetworkNode {
    Choice,
    Option(usize),
    Chance { option: usize, outcome: usize },
    Probability(usize),
    Utility(usize),
    Termination,
}

/// Directed network from the choice node to the termination node.
///
/// Probability and utility nodes are shared by all options, so there is one
/// path per (option, outcome) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionNetwork {
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<(usize, usize)>,
}

impl DecisionNetwork {
    pub fn index_of(&self, node: NetworkNode) -> Option<usize> {
        self.nodes.iter().position(|n| *n == node)
    }

    pub fn successors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(from, _)| *from == node)
            .map(|(_, to)| *to)
    }

    pub fn sources(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|n| !self.edges.iter().any(|(_, to)| to == n))
            .collect()
    }

    pub fn sinks(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|n| !self.edges.iter().any(|(from, _)| from == n))
            .collect()
    }

    /// Every choice-to-termination path as a list of nodes.
    pub fn paths(&self) -> Vec<Vec<NetworkNode>> {
        let (Some(start), Some(end)) = (
            self.index_of(NetworkNode::Choice),
            self.index_of(NetworkNode::Termination),
        ) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut stack = vec![start];
        self.walk(start, end, &mut stack, &mut out);
        out
    }

    fn walk(&self, at: usize, end: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<NetworkNode>>) {
        if at == end {
            out.push(stack.iter().map(|&i| self.nodes[i]).collect());
            return;
        }
        for next in self.successors(at).collect::<Vec<_>>() {
            stack.push(next);
            self.walk(next, end, stack, out);
            stack.pop();
        }
    }

    /// Kahn's algorithm; true when every node can be ordered.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.nodes.len()];
        for &(_, to) in &self.edges {
            indegree[to] += 1;
        }
        let mut ready: Vec<usize> = (0..self.nodes.len()).filter(|&n| indegree[n] == 0).collect();
        let mut seen = 0;
        while let Some(n) = ready.pop() {
            seen += 1;
            for next in self.successors(n).collect::<Vec<_>>() {
                indegree[next] -= 1;
                if indegree[next] == 0 {
                    ready.push(next);
                }
            }
        }
        seen == self.nodes.len()
    }
}

pub fn to_network<T: Scalar>(matrix: &DecisionMatrix<T>) -> DecisionNetwork {
    let n = matrix.option_count();
    let m = matrix.outcome_count();
    let mut nodes = vec![NetworkNode::Choice];
    nodes.extend((0..n).map(NetworkNode::Option));
    for i in 0..n {
        nodes.extend((0..m).map(|j| NetworkNode::Chance { option: i, outcome: j }));
    }
    nodes.extend((0..m).map(NetworkNode::Probability));
    nodes.extend((0..m).map(NetworkNode::Utility));
    nodes.push(NetworkNode::Termination);

    let idx = |node: NetworkNode| nodes.iter().position(|x| *x == node).expect("node exists");
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((idx(NetworkNode::Choice), idx(NetworkNode::Option(i))));
        for j in 0..m {
            let chance = idx(NetworkNode::Chance { option: i, outcome: j });
            edges.push((idx(NetworkNode::Option(i)), chance));
            edges.push((chance, idx(NetworkNode::Probability(j))));
        }
    }
    for j in 0..m {
        edges.push((idx(NetworkNode::Probability(j)), idx(NetworkNode::Utility(j))));
        edges.push((idx(NetworkNode::Utility(j)), idx(NetworkNode::Termination)));
    }
    DecisionNetwork { nodes, edges }
}
