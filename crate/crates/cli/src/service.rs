//! Stateless HTTP+JSON evaluation service.
//!
//! | method | path        | body                                                    |
//! |--------|-------------|---------------------------------------------------------|
//! | GET    | `/presets`  |                                                         |
//! | POST   | `/evaluate` | `{preset?, scenario?, power_model?, seed?, trials?}`    |
//! | POST   | `/utility`  | `{chart, alpha}` with `alpha` a number or an array      |
//!
//! Errors are `{"error": {"code", "message", "field"}}` with `code` one of
//! `validation` (400), `limit` (413) or `numeric` (422).

use std::collections::BTreeMap;
use std::net::SocketAddr;

use axum::body::Bytes;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use mmrx_core::chart::{alpha_key, ChartDocument};
use mmrx_core::montecarlo::{Scenario, DEFAULT_SEED, PRESET_NAMES};
use mmrx_core::power::ComponentPowerModel;
use mmrx_core::Error as CoreError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Largest trial count evaluated synchronously.
pub const MAX_TRIALS: u64 = 200;
/// Trials used when a request does not set any.
pub const DEFAULT_TRIALS: u64 = 100;
pub const DEFAULT_PRESET: &str = "downlink";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Validation,
    Limit,
    Numeric,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::Validation => StatusCode::BAD_REQUEST,
            ErrorCode::Limit => StatusCode::PAYLOAD_TOO_LARGE,
            ErrorCode::Numeric => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    pub field: Option<String>,
}

impl ApiError {
    pub fn validation(message: impl Into<String>, field: Option<&str>) -> Self {
        Self {
            code: ErrorCode::Validation,
            message: message.into(),
            field: field.map(str::to_string),
        }
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::InvalidParameter { .. } | CoreError::Parse(_) | CoreError::Domain(_) => ErrorCode::Validation,
            CoreError::DegenerateChannel(_) | CoreError::Numeric { .. } | CoreError::Trial { .. } => ErrorCode::Numeric,
        };
        Self {
            code,
            field: e.field().map(str::to_string),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self });
        (self.code.status(), json_body(&body)).into_response()
    }
}

fn json_body(v: &impl Serialize) -> ([(header::HeaderName, &'static str); 1], String) {
    let mut s = serde_json::to_string_pretty(&serde_json::to_value(v).expect("serializable")).expect("serializable");
    s.push('\n');
    ([(header::CONTENT_TYPE, "application/json")], s)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    #[serde(default)]
    pub preset: Option<String>,
    /// Partial scenario merged over the preset.
    #[serde(default)]
    pub scenario: Option<Value>,
    /// A preset name (`"HPADC"`, `"LPADC"`, `"IPADC"`) or a partial component model.
    #[serde(default)]
    pub power_model: Option<Value>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<u64>,
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Build and validate the scenario described by an evaluation request.
pub fn resolve(req: &EvaluateRequest) -> Result<Scenario, ApiError> {
    let name = req.preset.as_deref().unwrap_or(DEFAULT_PRESET);
    let preset = Scenario::preset(name).ok_or_else(|| {
        ApiError::validation(
            format!("unknown preset {name:?}; expected one of {PRESET_NAMES:?}"),
            Some("preset"),
        )
    })?;
    let mut value = serde_json::to_value(&preset).expect("scenario serializes");
    let patch_sets_trials = matches!(&req.scenario, Some(Value::Object(m)) if m.contains_key("trials"));
    if let Some(patch) = &req.scenario {
        if !patch.is_object() {
            return Err(ApiError::validation("scenario must be a JSON object", Some("scenario")));
        }
        merge(&mut value, patch);
    }
    match &req.power_model {
        Some(Value::String(label)) => {
            let m = ComponentPowerModel::preset(label).ok_or_else(|| {
                ApiError::validation(format!("unknown power model {label:?}"), Some("power_model"))
            })?;
            value["power_model"] = serde_json::to_value(m).expect("power model serializes");
        }
        Some(patch @ Value::Object(_)) => merge(&mut value["power_model"], patch),
        Some(_) => {
            return Err(ApiError::validation(
                "power_model must be a preset name or an object",
                Some("power_model"),
            ))
        }
        None => {}
    }
    if let Some(seed) = req.seed {
        value["channel"]["seed"] = json!(seed);
    }
    if let Some(trials) = req.trials {
        value["trials"] = json!(trials);
    } else if !patch_sets_trials {
        value["trials"] = json!(DEFAULT_TRIALS);
    }
    let scenario: Scenario = serde_json::from_value(value)
        .map_err(|e| ApiError::validation(format!("invalid scenario: {e}"), None))?;
    scenario.validate()?;
    if scenario.trials > MAX_TRIALS {
        return Err(ApiError {
            code: ErrorCode::Limit,
            message: format!(
                "trials = {} exceeds the synchronous limit of {MAX_TRIALS}; use the command line for larger runs",
                scenario.trials
            ),
            field: Some("trials".into()),
        });
    }
    Ok(scenario)
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::validation(format!("malformed request body: {e}"), None))
}

async fn presets() -> impl IntoResponse {
    let scenarios: BTreeMap<String, Scenario> = Scenario::presets().into_iter().map(|s| (s.name.clone(), s)).collect();
    let power_models: BTreeMap<&str, ComponentPowerModel> = ["HPADC", "LPADC", "IPADC"]
        .into_iter()
        .filter_map(|n| ComponentPowerModel::preset(n).map(|m| (n, m)))
        .collect();
    json_body(&json!({
        "scenarios": scenarios,
        "power_models": power_models,
        "limits": {
            "max_trials": MAX_TRIALS,
            "default_trials": DEFAULT_TRIALS,
            "default_seed": DEFAULT_SEED,
        },
    }))
}

async fn evaluate(body: Bytes) -> Result<Response, ApiError> {
    let req: EvaluateRequest = parse_body(&body)?;
    let scenario = resolve(&req)?;
    let doc = tokio::task::spawn_blocking(move || {
        mmrx_core::montecarlo::run_sweep(&scenario).map(|s| ChartDocument::from_sweep(&scenario, &s))
    })
    .await
    .map_err(|e| ApiError {
        code: ErrorCode::Numeric,
        message: format!("evaluation task failed: {e}"),
        field: None,
    })??;
    Ok(([(header::CONTENT_TYPE, "application/json")], doc.to_canonical_json()).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Alphas {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilityRequest {
    chart: ChartDocument,
    alpha: Alphas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub alpha: String,
    pub index: usize,
    pub point: mmrx_core::TradeoffPoint,
}

async fn utility(body: Bytes) -> Result<Response, ApiError> {
    let req: UtilityRequest = parse_body(&body)?;
    req.chart.validate()?;
    let alphas = match req.alpha {
        Alphas::One(a) => vec![a],
        Alphas::Many(v) if !v.is_empty() => v,
        Alphas::Many(_) => return Err(ApiError::validation("alpha list is empty", Some("alpha"))),
    };
    let mut selections = Vec::with_capacity(alphas.len());
    for a in alphas {
        let index = req.chart.select(a)?;
        selections.push(Selection {
            alpha: alpha_key(a),
            index,
            point: req.chart.points[index].clone(),
        });
    }
    Ok(json_body(&json!({ "selections": selections })).into_response())
}

pub fn app() -> Router {
    Router::new()
        .route("/presets", get(presets))
        .route("/evaluate", post(evaluate))
        .route("/utility", post(utility))
}

pub async fn serve(addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
