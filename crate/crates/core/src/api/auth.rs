use std::collections::HashMap;
use std::path::Path;

use axum::extract::FromRequestParts;
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use serde::Deserialize;

use crate::store::{Principal, Role};

use super::{ApiError, AppState};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenEntry {
    role: Role,
    name: String,
}

/// Static bearer tokens: a JSON object `{token: {role, name}}`.
#[derive(Clone, Debug, Default)]
pub struct TokenTable(HashMap<String, Principal>);

#[derive(Debug, thiserror::Error)]
pub enum TokenError {
    #[error("cannot read tokens file: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad tokens file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("bad tokens file: {0}")]
    Invalid(String),
}

impl TokenTable {
    pub fn from_json(text: &str) -> Result<Self, TokenError> {
        let entries: HashMap<String, TokenEntry> = serde_json::from_str(text)?;
        let mut table = HashMap::new();
        for (token, entry) in entries {
            if token.trim().is_empty() {
                return Err(TokenError::Invalid("empty token".into()));
            }
            if entry.role == Role::Public {
                return Err(TokenError::Invalid(format!("token for {} grants nothing", entry.name)));
            }
            table.insert(
                token,
                Principal {
                    role: entry.role,
                    name: entry.name,
                },
            );
        }
        Ok(TokenTable(table))
    }

    pub fn load(path: &Path) -> Result<Self, TokenError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn insert(&mut self, token: impl Into<String>, principal: Principal) {
        self.0.insert(token.into(), principal);
    }

    pub fn principal(&self, token: &str) -> Option<&Principal> {
        self.0.get(token)
    }
}

/// The caller. Requests without an `Authorization` header are public.
pub struct Caller(pub Principal);

impl Caller {
    pub fn require_curator(&self) -> Result<&Principal, ApiError> {
        match self.0.role {
            Role::Curator => Ok(&self.0),
            Role::Public => Err(ApiError::unauthorized("a curator token is required")),
            Role::Contributor => Err(ApiError::forbidden("curator role required")),
        }
    }
}

impl FromRequestParts<AppState> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let Some(header) = parts.headers.get(AUTHORIZATION) else {
            return Ok(Caller(Principal::public()));
        };
        let token = header
            .to_str()
            .ok()
            .and_then(|h| h.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or_else(|| ApiError::unauthorized("expected a Bearer token"))?;
        state
            .tokens
            .principal(token)
            .cloned()
            .map(Caller)
            .ok_or_else(|| ApiError::unauthorized("unknown token"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_tokens() {
        let table = TokenTable::from_json(r#"{"s3cret": {"role": "curator", "name": "mara"}}"#).unwrap();
        assert_eq!(table.principal("s3cret"), Some(&Principal::curator("mara")));
        assert!(table.principal("other").is_none());
        assert!(TokenTable::from_json(r#"{"x": {"role": "public", "name": "p"}}"#).is_err());
        assert!(TokenTable::from_json(r#"{"x": {"role": "admin", "name": "p"}}"#).is_err());
        assert!(TokenTable::from_json("[]").is_err());
    }
}
