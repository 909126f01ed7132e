//! Intent-matching dialog engine for the screening conversation.
//!
//! Matching is deterministic token overlap: the utterance and every sample
//! phrase are lowercased, stripped of punctuation and tokenized; an intent
//! scores the best `|overlap| / |phrase tokens|` over its phrases and wins
//! at 0.5 or better, ties broken by definition order. Anything below the
//! threshold falls back to a fixed reply that leaves the dialog state
//! untouched.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Reply used whenever no intent clears the match threshold.
pub const FALLBACK_REPLY: &str = "I'm sorry I didn't understand what you said";

/// Minimum overlap score for an intent to match.
pub const MATCH_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DialogState {
    Greeting,
    AskVaccination,
    AskSymptoms,
    Advise,
    Done,
}

impl DialogState {
    pub fn as_str(&self) -> &'static str {
        match self {
            DialogState::Greeting => "greeting",
            DialogState::AskVaccination => "ask_vaccination",
            DialogState::AskSymptoms => "ask_symptoms",
            DialogState::Advise => "advise",
            DialogState::Done => "done",
        }
    }
}

/// One dialog unit: sample phrases, the canned response, and the edge it
/// takes through the flow graph (`state -> next_state`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Intent {
    pub name: String,
    pub state: DialogState,
    pub next_state: DialogState,
    pub response: String,
    pub sample_phrases: Vec<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChatError {
    #[error("intent list is empty")]
    EmptyIntents,
    #[error("duplicate intent name `{0}`")]
    DuplicateName(String),
    #[error("intent `{name}` has {count} sample phrases, need 10..=15")]
    PhraseCount { name: String, count: usize },
    #[error("intent `{name}` does not advance the dialog ({from} -> {to})")]
    NoProgress {
        name: String,
        from: &'static str,
        to: &'static str,
    },
    #[error("state `{0}` is reachable but has no intents")]
    DeadEnd(&'static str),
    #[error("phrase `{phrase}` appears in two intents of state `{state}`")]
    DuplicatePhrase { phrase: String, state: &'static str },
    #[error("reading {reading} does not exceed the fever threshold {threshold}")]
    BelowThreshold { reading: f64, threshold: f64 },
    #[error("person {0} already has an active session")]
    SessionActive(u32),
    #[error("person {0} has no session")]
    NoSession(u32),
    #[error("session for person {0} is already done")]
    SessionDone(u32),
}

/// Validated intent collection defining the conversation flow.
#[derive(Clone, Debug)]
pub struct IntentSet {
    intents: Vec<Intent>,
}

impl IntentSet {
    pub fn new(intents: Vec<Intent>) -> Result<Self, ChatError> {
        if intents.is_empty() {
            return Err(ChatError::EmptyIntents);
        }
        let mut names = BTreeSet::new();
        for it in &intents {
            if !names.insert(it.name.clone()) {
                return Err(ChatError::DuplicateName(it.name.clone()));
            }
            let n = it.sample_phrases.len();
            if !(10..=15).contains(&n) {
                return Err(ChatError::PhraseCount {
                    name: it.name.clone(),
                    count: n,
                });
            }
            // Strict forward progress keeps the flow acyclic and every
            // session bounded by the number of states.
            if it.next_state <= it.state || it.state == DialogState::Done {
                return Err(ChatError::NoProgress {
                    name: it.name.clone(),
                    from: it.state.as_str(),
                    to: it.next_state.as_str(),
                });
            }
        }
        // Identical phrases within one state would make self-classification
        // ambiguous.
        let mut seen: BTreeSet<(DialogState, String)> = BTreeSet::new();
        for it in &intents {
            for p in &it.sample_phrases {
                let key = (it.state, tokenize(p).into_iter().collect::<Vec<_>>().join(" "));
                if !seen.insert(key) {
                    return Err(ChatError::DuplicatePhrase {
                        phrase: p.clone(),
                        state: it.state.as_str(),
                    });
                }
            }
        }
        let set = Self { intents };
        // Walk the flow: every reachable non-done state needs an exit.
        let mut stack = alloc::vec![DialogState::Greeting];
        let mut visited = BTreeSet::new();
        while let Some(s) = stack.pop() {
            if s == DialogState::Done || !visited.insert(s) {
                continue;
            }
            let mut any = false;
            for it in set.for_state(s) {
                any = true;
                stack.push(it.next_state);
            }
            if !any {
                return Err(ChatError::DeadEnd(s.as_str()));
            }
        }
        Ok(set)
    }

    pub fn intents(&self) -> &[Intent] {
        &self.intents
    }

    /// Intents applicable in a given dialog state, in definition order.
    pub fn for_state(&self, state: DialogState) -> impl Iterator<Item = &Intent> {
        self.intents.iter().filter(move |i| i.state == state)
    }
}

/// Lowercase, strip punctuation, split on whitespace, dedupe.
pub fn tokenize(text: &str) -> BTreeSet<String> {
    let lowered = text.to_lowercase();
    let cleaned: String = lowered
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect();
    cleaned.split_whitespace().map(|t| t.to_string()).collect()
}

/// Best-scoring intent at or above [`MATCH_THRESHOLD`], or `None` for the
/// fallback. Ties go to the earlier-defined intent.
pub fn match_intent<'a, I>(utterance: &str, intents: I) -> Option<&'a Intent>
where
    I: IntoIterator<Item = &'a Intent>,
{
    let query = tokenize(utterance);
    if query.is_empty() {
        return None;
    }
    let mut best: Option<(&Intent, f64)> = None;
    for intent in intents {
        let mut score: f64 = 0.0;
        for phrase in &intent.sample_phrases {
            let tokens = tokenize(phrase);
            if tokens.is_empty() {
                continue;
            }
            let overlap = tokens.intersection(&query).count();
            score = score.max(overlap as f64 / tokens.len() as f64);
        }
        if score >= MATCH_THRESHOLD && best.is_none_or(|(_, b)| score > b) {
            best = Some((intent, score));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Robot,
    User,
}

/// One screening conversation with one person. The transcript is
/// append-only; fallback exchanges do not advance the state.
#[derive(Clone, Debug)]
pub struct Session {
    pub person_id: u32,
    pub state: DialogState,
    pub transcript: Vec<(Speaker, String)>,
    pending_prompt: String,
}

impl Session {
    /// The last question the robot asked; reprinted after a fallback.
    pub fn pending_prompt(&self) -> &str {
        &self.pending_prompt
    }

    pub fn is_done(&self) -> bool {
        self.state == DialogState::Done
    }
}

/// Reply produced by one exchange.
#[derive(Clone, Debug, PartialEq)]
pub struct ChatReply {
    pub text: String,
    pub state: DialogState,
    pub fallback: bool,
}

/// Session registry plus the intent configuration. One active session per
/// person; a finished session may be replaced on a later fever trigger.
#[derive(Clone, Debug)]
pub struct ChatEngine {
    intents: IntentSet,
    fever_threshold: f64,
    sessions: BTreeMap<u32, Session>,
}

impl ChatEngine {
    pub fn new(intents: IntentSet, fever_threshold: f64) -> Self {
        Self {
            intents,
            fever_threshold,
            sessions: BTreeMap::new(),
        }
    }

    pub fn intent_set(&self) -> &IntentSet {
        &self.intents
    }

    /// Open a session on a fever trigger; the opening line carries the
    /// measured reading.
    pub fn start_session(&mut self, person_id: u32, reading: f64) -> Result<String, ChatError> {
        if reading <= self.fever_threshold {
            return Err(ChatError::BelowThreshold {
                reading,
                threshold: self.fever_threshold,
            });
        }
        if self.sessions.get(&person_id).is_some_and(|s| !s.is_done()) {
            return Err(ChatError::SessionActive(person_id));
        }
        let opening = format!(
            "Hello, I measured your temperature at {reading:.1} degrees Celsius, \
             which is above the fever threshold. I have a few quick questions. \
             Please say hello to begin."
        );
        let session = Session {
            person_id,
            state: DialogState::Greeting,
            transcript: alloc::vec![(Speaker::Robot, opening.clone())],
            pending_prompt: opening.clone(),
        };
        self.sessions.insert(person_id, session);
        Ok(opening)
    }

    /// One exchange. A fallback replies with the exact fallback string and
    /// leaves state and transcript untouched; the caller re-prompts with
    /// [`Session::pending_prompt`].
    pub fn respond(&mut self, person_id: u32, utterance: &str) -> Result<ChatReply, ChatError> {
        let session = self
            .sessions
            .get_mut(&person_id)
            .ok_or(ChatError::NoSession(person_id))?;
        if session.is_done() {
            return Err(ChatError::SessionDone(person_id));
        }
        match match_intent(utterance, self.intents.for_state(session.state)) {
            None => Ok(ChatReply {
                text: FALLBACK_REPLY.to_string(),
                state: session.state,
                fallback: true,
            }),
            Some(intent) => {
                session.transcript.push((Speaker::User, utterance.to_string()));
                session.transcript.push((Speaker::Robot, intent.response.clone()));
                session.state = intent.next_state;
                session.pending_prompt = intent.response.clone();
                Ok(ChatReply {
                    text: intent.response.clone(),
                    state: intent.next_state,
                    fallback: false,
                })
            }
        }
    }

    pub fn session(&self, person_id: u32) -> Option<&Session> {
        self.sessions.get(&person_id)
    }

    /// Ids with a session that has not reached `done`, ascending.
    pub fn active_ids(&self) -> Vec<u32> {
        self.sessions
            .iter()
            .filter(|(_, s)| !s.is_done())
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn has_active(&self) -> bool {
        self.sessions.values().any(|s| !s.is_done())
    }

    pub fn remove_session(&mut self, person_id: u32) -> Option<Session> {
        self.sessions.remove(&person_id)
    }
}
