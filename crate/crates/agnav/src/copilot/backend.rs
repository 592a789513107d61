//! Chat backends: the behavioral contract plus the scripted (transcript
//! replay) and live HTTP implementations. The deterministic rule backend
//! lives in [`super::rule`].

use std::path::Path;
use std::sync::Mutex;

use serde::Deserialize;
use serde_json::json;

use super::CopilotError;

/// Environment variable holding the live backend API key.
pub const ENV_API_KEY: &str = "OSMAG_NAV_LLM_KEY";
/// Environment variable holding the live backend base URL.
pub const ENV_BASE_URL: &str = "OSMAG_NAV_LLM_URL";

/// A text-completion oracle. Deterministic backends (rule, scripted)
/// return identical output for identical input.
pub trait ChatBackend {
    fn complete(&self, system_prompt: &str, user_prompt: &str) -> Result<String, CopilotError>;

    /// Backend name plus model label, for logs and result provenance.
    fn identity(&self) -> String;
}

/// Replays recorded responses in order; used to pin tests to transcripts.
pub struct ScriptedBackend {
    label: String,
    responses: Mutex<Vec<String>>,
    calls: Mutex<Vec<(String, String)>>,
}

#[derive(Deserialize)]
struct TranscriptEntry {
    response: String,
}

impl ScriptedBackend {
    pub fn new(responses: Vec<String>) -> Self {
        ScriptedBackend {
            label: "scripted".into(),
            responses: Mutex::new(responses),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Loads a transcript file: a JSON array of `{"response": "..."}`.
    pub fn from_file(path: &Path) -> Result<Self, CopilotError> {
        let text = std::fs::read_to_string(path)?;
        let entries: Vec<TranscriptEntry> = serde_json::from_str(&text)?;
        let mut backend = ScriptedBackend::new(entries.into_iter().map(|e| e.response).collect());
        backend.label = format!("scripted:{}", path.file_stem().unwrap_or_default().to_string_lossy());
        Ok(backend)
    }

    /// Number of completions served so far.
    pub fn calls(&self) -> usize {
        self.calls.lock().expect("no poisoned locks in tests").len()
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, system_prompt: &str, user_prompt: &str) -> Result<String, CopilotError> {
        self.calls
            .lock()
            .expect("no poisoned locks in tests")
            .push((system_prompt.to_string(), user_prompt.to_string()));
        let mut responses = self.responses.lock().expect("no poisoned locks in tests");
        if responses.is_empty() {
            return Err(CopilotError::Backend("scripted transcript exhausted".into()));
        }
        Ok(responses.remove(0))
    }

    fn identity(&self) -> String {
        self.label.clone()
    }
}

/// OpenAI-compatible chat-completions client. One request per operation,
/// temperature 0, 30 s timeout, two transport retries.
pub struct HttpBackend {
    base_url: String,
    api_key: String,
    model: String,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn from_env(model: &str) -> Result<Self, CopilotError> {
        let base_url = std::env::var(ENV_BASE_URL)
            .map_err(|_| CopilotError::Backend(format!("{ENV_BASE_URL} is not set")))?;
        let api_key = std::env::var(ENV_API_KEY)
            .map_err(|_| CopilotError::Backend(format!("{ENV_API_KEY} is not set")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(30))
            .build()
            .map_err(|e| CopilotError::Backend(e.to_string()))?;
        Ok(HttpBackend { base_url, api_key, model: model.to_string(), client })
    }

    fn request_once(&self, system_prompt: &str, user_prompt: &str) -> Result<String, CopilotError> {
        let body = json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_prompt},
            ],
            "temperature": 0,
        });
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let resp = self
            .client
            .post(url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| CopilotError::Backend(e.to_string()))?;
        if !resp.status().is_success() {
            return Err(CopilotError::Backend(format!("HTTP {}", resp.status())));
        }
        let value: serde_json::Value = resp.json().map_err(|e| CopilotError::Backend(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| CopilotError::Backend("response has no message content".into()))
    }
}

impl ChatBackend for HttpBackend {
    fn complete(&self, system_prompt: &str, user_prompt: &str) -> Result<String, CopilotError> {
        let mut last = None;
        for _ in 0..3 {
            match self.request_once(system_prompt, user_prompt) {
                Ok(text) => return Ok(text),
                Err(e) => last = Some(e),
            }
        }
        Err(last.unwrap_or_else(|| CopilotError::Backend("unreachable".into())))
    }

    fn identity(&self) -> String {
        format!("http:{}", self.model)
    }
}
