//! Serialized form of reals: decimal strings, so no digits are lost to `f64`.
//! Plain JSON numbers are accepted on input.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{PrecisionContext, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum RealText {
    Text(String),
    Number(serde_json::Number),
}

impl RealText {
    pub(crate) fn from_real(ctx: PrecisionContext, x: &Real) -> Self {
        RealText::Text(ctx.format(x))
    }

    pub(crate) fn to_real(&self, ctx: PrecisionContext) -> Result<Real> {
        match self {
            RealText::Text(text) => ctx.parse(text),
            RealText::Number(number) => ctx.parse(&number.to_string()),
        }
    }
}

pub(crate) fn texts(ctx: PrecisionContext, xs: &[Real]) -> Vec<RealText> {
    xs.iter().map(|x| RealText::from_real(ctx, x)).collect()
}

pub(crate) fn reals(ctx: PrecisionContext, xs: &[RealText]) -> Result<Vec<Real>> {
    xs.iter().map(|x| x.to_real(ctx)).collect()
}
