//! JSON manifold documents consumed by the CLI. Block shorthand is preferred;
//! an explicit Gram matrix is also accepted. The signature is always
//! recomputed; a user-supplied `sigma` must agree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::ManifoldModel;
use crate::error::{Error, Result};
use crate::lattice::{build_form, Block, ClassVector, IntersectionForm};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifoldSpecDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<i64>>>,
    pub chi: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<i64>,
    #[serde(default)]
    pub classes: BTreeMap<String, Vec<i64>>,
    /// Optional genus annotations per class name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub genera: BTreeMap<String, i64>,
}

fn parse_block(s: &str) -> Result<Block> {
    match s {
        "+1" | "1" => Ok(Block::PlusOne),
        "-1" => Ok(Block::MinusOne),
        "H" | "h" => Ok(Block::Hyperbolic),
        other => Err(Error::InvalidInput(format!(
            "unknown block '{other}' (expected \"+1\", \"-1\" or \"H\")"
        ))),
    }
}

impl ManifoldSpecDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad manifold JSON: {e}")))
    }

    pub fn form(&self) -> Result<IntersectionForm> {
        match (&self.blocks, &self.gram) {
            (Some(blocks), None) => {
                let parsed: Vec<Block> =
                    blocks.iter().map(|s| parse_block(s)).collect::<Result<_>>()?;
                build_form(&parsed)
            }
            (None, Some(gram)) => IntersectionForm::from_gram(gram.clone()),
            (Some(_), Some(_)) => Err(Error::InvalidInput(
                "give either blocks or gram, not both".into(),
            )),
            (None, None) => Err(Error::InvalidInput("missing blocks or gram".into())),
        }
    }

    pub fn to_model(&self) -> Result<ManifoldModel> {
        let form = self.form()?;
        let model = ManifoldModel::new(self.name.clone(), form, self.chi);
        if let Some(sigma) = self.sigma {
            if sigma != model.sigma {
                return Err(Error::InvalidInput(format!(
                    "declared sigma {sigma} does not match computed signature {}",
                    model.sigma
                )));
            }
        }
        for (name, coords) in &self.classes {
            if coords.len() != model.form.rank() {
                return Err(Error::InvalidInput(format!(
                    "class '{name}' has length {} but the form has rank {}",
                    coords.len(),
                    model.form.rank()
                )));
            }
        }
        Ok(model)
    }

    pub fn class(&self, name: &str) -> Result<ClassVector> {
        self.classes
            .get(name)
            .cloned()
            .map(ClassVector)
            .ok_or_else(|| Error::InvalidInput(format!("unknown class '{name}'")))
    }
}
