//! Weights and curvature profiles given as expressions.
//!
//! Expressions use evalexpr syntax: `^` is a power, functions are spelled
//! `math::sqrt`, `math::exp` and so on, and integer literals divide as
//! integers (write `1.0 / 2`, not `1 / 2`).

use evalexpr::error::EvalexprResultValue;
use evalexpr::{
    build_operator_tree, Context, DefaultNumericTypes, EvalexprError, EvalexprResult, Node, Value,
};
use polyconvex::monge_ampere::Weight;
use polyconvex::Point2;

/// A compiled expression over a fixed list of variable names.
#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    node: Node<DefaultNumericTypes>,
    names: &'static [&'static str],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression `{expr}`: {message}")]
pub struct ExpressionError {
    pub expr: String,
    pub message: String,
}

impl Expression {
    pub fn compile(source: &str, names: &'static [&'static str]) -> Result<Self, ExpressionError> {
        let err = |message: String| ExpressionError {
            expr: source.to_string(),
            message,
        };
        let node =
            build_operator_tree::<DefaultNumericTypes>(source).map_err(|e| err(e.to_string()))?;
        if let Some(unknown) = node
            .iter_variable_identifiers()
            .find(|v| !names.contains(v))
        {
            return Err(err(format!(
                "unknown variable `{unknown}`; allowed: {}",
                names.join(", ")
            )));
        }
        Ok(Self {
            source: source.to_string(),
            node,
            names,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn uses(&self, name: &str) -> bool {
        self.node.iter_variable_identifiers().any(|v| v == name)
    }

    /// Evaluates with `values[i]` bound to the `i`-th name.
    pub fn eval(&self, values: &[f64]) -> Result<f64, ExpressionError> {
        let ctx = Bindings {
            names: self.names,
            values: values.iter().map(|&v| Value::Float(v)).collect(),
        };
        self.node
            .eval_number_with_context(&ctx)
            .map_err(|e| ExpressionError {
                expr: self.source.clone(),
                message: e.to_string(),
            })
    }
}

struct Bindings {
    names: &'static [&'static str],
    values: Vec<Value<DefaultNumericTypes>>,
}

impl Context for Bindings {
    type NumericTypes = DefaultNumericTypes;

    fn get_value(&self, identifier: &str) -> Option<&Value<DefaultNumericTypes>> {
        self.names
            .iter()
            .position(|n| *n == identifier)
            .map(|i| &self.values[i])
    }

    fn call_function(
        &self,
        identifier: &str,
        _argument: &Value<DefaultNumericTypes>,
    ) -> EvalexprResultValue<DefaultNumericTypes> {
        Err(EvalexprError::FunctionIdentifierNotFound(
            identifier.to_string(),
        ))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(
        &mut self,
        _disabled: bool,
    ) -> EvalexprResult<(), DefaultNumericTypes> {
        Err(EvalexprError::BuiltinFunctionsCannotBeDisabled)
    }
}

pub const THETA_VARIABLES: &[&str] = &["p1", "p2", "z", "x1", "x2"];
pub const CURVATURE_VARIABLES: &[&str] = &["nx", "ny", "nz"];

/// `θ(p, z, x)` from an expression in `p1, p2, z, x1, x2`. Dependence on
/// `z` and `x` is read off the expression, which lets the solver pick
/// Newton when `z` does not occur.
#[derive(Debug, Clone)]
pub struct ExprWeight(Expression);

impl ExprWeight {
    /// Compiles and probes the expression at the origin, so evaluation
    /// errors surface here rather than inside a solve.
    pub fn parse(source: &str) -> Result<Self, ExpressionError> {
        let e = Expression::compile(source, THETA_VARIABLES)?;
        e.eval(&[0.0; 5])?;
        Ok(Self(e))
    }

    pub fn source(&self) -> &str {
        self.0.source()
    }
}

impl Weight for ExprWeight {
    fn eval(&self, p: Point2, z: f64, x: Point2) -> f64 {
        // A failing evaluation yields NaN, which the solver rejects as a
        // non-positive weight.
        self.0.eval(&[p.x, p.y, z, x.x, x.y]).unwrap_or(f64::NAN)
    }

    fn depends_on_z(&self) -> bool {
        self.0.uses("z")
    }

    fn depends_on_x(&self) -> bool {
        self.0.uses("x1") || self.0.uses("x2")
    }
}
