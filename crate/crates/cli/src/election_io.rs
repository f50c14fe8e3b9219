//! JSON election documents: parsing with field-level diagnostics and
//! canonical serialization. Candidate and voter order in the file is the
//! canonical order of the parsed election.

use fairvote_core::{Election, Error, PerturbationSpec, Result};
use serde_json::{json, Map, Value};

fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be a JSON object")))
}

fn string_array(v: &Value, what: &str) -> Result<Vec<String>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::InvalidInput(format!("{what} must be an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidInput(format!("{what}[{i}] must be a string")))
        })
        .collect()
}

/// Parse an election document:
/// `{"candidates": [..], "k": int, "voters": [{"id": s, "approvals": [..]}]}`.
pub fn parse_election(document: &str) -> Result<Election> {
    let value: Value = serde_json::from_str(document)
        .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    election_from_value(&value)
}

pub fn election_from_value(value: &Value) -> Result<Election> {
    let obj = as_object(value, "election document")?;
    let candidates = string_array(
        obj.get("candidates")
            .ok_or_else(|| Error::InvalidInput("missing field \"candidates\"".into()))?,
        "\"candidates\"",
    )?;
    let k = obj
        .get("k")
        .ok_or_else(|| Error::InvalidInput("missing field \"k\"".into()))?
        .as_u64()
        .ok_or_else(|| Error::InvalidInput("\"k\" must be a positive integer".into()))?;
    if k as usize > candidates.len() {
        return input_err("k exceeds candidate count");
    }
    let voters_value = obj
        .get("voters")
        .ok_or_else(|| Error::InvalidInput("missing field \"voters\"".into()))?
        .as_array()
        .ok_or_else(|| Error::InvalidInput("\"voters\" must be an array".into()))?;
    let mut voters = Vec::with_capacity(voters_value.len());
    for (i, v) in voters_value.iter().enumerate() {
        let vo = as_object(v, &format!("\"voters\"[{i}]"))?;
        let id = vo
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidInput(format!("\"voters\"[{i}].id must be a string")))?;
        let approvals = string_array(
            vo.get("approvals").ok_or_else(|| {
                Error::InvalidInput(format!("\"voters\"[{i}] is missing \"approvals\""))
            })?,
            &format!("\"voters\"[{i}].approvals"),
        )?;
        voters.push((id.to_string(), approvals));
    }
    Election::new(candidates, voters, k as usize)
}

/// Canonical JSON form of an election; parsing it back yields an equal
/// election.
pub fn election_to_value(e: &Election) -> Value {
    json!({
        "candidates": e.candidates(),
        "k": e.k(),
        "voters": (0..e.num_voters())
            .map(|v| json!({"id": e.voters()[v], "approvals": e.approval_ids(v)}))
            .collect::<Vec<_>>(),
    })
}

/// Parse a perturbation-steps document:
/// `{"steps": [{"voter": s, "approvals": [..]}]}`.
pub fn parse_steps(document: &str) -> Result<Vec<PerturbationSpec>> {
    let value: Value = serde_json::from_str(document)
        .map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    let obj = as_object(&value, "steps document")?;
    let steps = obj
        .get("steps")
        .ok_or_else(|| Error::InvalidInput("missing field \"steps\"".into()))?
        .as_array()
        .ok_or_else(|| Error::InvalidInput("\"steps\" must be an array".into()))?;
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let so = as_object(s, &format!("\"steps\"[{i}]"))?;
            let voter = so.get("voter").and_then(Value::as_str).ok_or_else(|| {
                Error::InvalidInput(format!("\"steps\"[{i}].voter must be a string"))
            })?;
            let approvals = string_array(
                so.get("approvals").ok_or_else(|| {
                    Error::InvalidInput(format!("\"steps\"[{i}] is missing \"approvals\""))
                })?,
                &format!("\"steps\"[{i}].approvals"),
            )?;
            Ok(PerturbationSpec {
                voter: voter.to_string(),
                new_approvals: approvals,
            })
        })
        .collect()
}

pub fn steps_to_value(steps: &[PerturbationSpec]) -> Value {
    json!({
        "steps": steps
            .iter()
            .map(|s| json!({"voter": s.voter, "approvals": s.new_approvals}))
            .collect::<Vec<_>>(),
    })
}
