//! LLM-backed agent: renders the phase templates, queries the gateway, and
//! parses the structured response, reprompting up to the attempt budget
//! before reporting a fallback.

use std::sync::Arc;

use crate::config::{AgentKind, AgentSpec, PlayerId};
use crate::events::Phase;
use crate::gateway::{CompletionRequest, Gateway, GatewayError};

use super::parse::{parse_phase_response, ParseError, ParsedResponse};
use super::prompts::{
    render_forced_accusation, render_phase1, render_phase2, render_phase3, PromptTemplates,
};
use super::{Agent, AgentDecision, AgentFailure, ShowRequest, TurnContext, MAX_ATTEMPTS};

pub struct LlmAgent {
    seat: PlayerId,
    spec: AgentSpec,
    gateway: Arc<Gateway>,
    templates: Arc<PromptTemplates>,
}

enum AttemptError {
    Parse(ParseError),
    Gateway(GatewayError),
}

impl std::fmt::Display for AttemptError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttemptError::Parse(e) => write!(f, "{e}"),
            AttemptError::Gateway(e) => write!(f, "{e}"),
        }
    }
}

impl LlmAgent {
    pub fn new(
        seat: PlayerId,
        spec: AgentSpec,
        gateway: Arc<Gateway>,
        templates: Arc<PromptTemplates>,
    ) -> LlmAgent {
        LlmAgent {
            seat,
            spec,
            gateway,
            templates,
        }
    }

    fn request(&self, prompt: String) -> CompletionRequest {
        CompletionRequest::new(
            self.spec.model_id.clone().unwrap_or_default(),
            prompt,
            self.spec.temperature,
        )
    }

    fn reprompt_text(original: &str, error: &AttemptError) -> String {
        format!(
            "{original}\n\nYour previous response could not be used ({error}). \
             Respond again in the EXACT format required."
        )
    }

    /// Runs the attempt loop for one phase. `validate` can reject a
    /// syntactically valid parse (for example a shown card that is not among
    /// the matching cards); rejection consumes an attempt like any parse
    /// failure. Fatal gateway errors (fixture mismatch, missing credentials)
    /// abort the game instead of burning attempts.
    fn attempt_loop(
        &mut self,
        phase: Phase,
        prompt: String,
        mut validate: impl FnMut(&ParsedResponse) -> Result<(), ParseError>,
    ) -> Result<AgentDecision, AgentFailure> {
        let mut current_prompt = prompt.clone();
        let mut last_raw = String::new();
        for attempt in 1..=MAX_ATTEMPTS {
            let result: Result<(), AttemptError> = match self
                .gateway
                .complete(&self.request(current_prompt.clone()))
            {
                Ok(text) => {
                    last_raw = text.clone();
                    match parse_phase_response(phase, &text) {
                        Ok(parsed) => match validate(&parsed) {
                            Ok(()) => {
                                return Ok(AgentDecision::parsed_ok(phase, text, parsed, attempt))
                            }
                            Err(e) => Err(AttemptError::Parse(e)),
                        },
                        Err(e) => Err(AttemptError::Parse(e)),
                    }
                }
                Err(err) => {
                    if matches!(
                        err,
                        GatewayError::FixtureMismatch(_)
                            | GatewayError::NotConfigured
                            | GatewayError::MissingCredentials(_)
                    ) {
                        return Err(AgentFailure::Gateway(err));
                    }
                    last_raw = format!("<gateway error: {err}>");
                    Err(AttemptError::Gateway(err))
                }
            };
            if let Err(error) = result {
                if attempt < MAX_ATTEMPTS {
                    current_prompt = Self::reprompt_text(&prompt, &error);
                }
            }
        }
        Ok(AgentDecision::fallback(phase, last_raw))
    }
}

impl Agent for LlmAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Llm
    }

    fn deduce(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let prompt = render_phase1(&self.templates, ctx)?;
        self.attempt_loop(Phase::Deduce, prompt, |_| Ok(()))
    }

    fn act(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let prompt = render_phase2(&self.templates, ctx)?;
        self.attempt_loop(Phase::Act, prompt, |_| Ok(()))
    }

    fn show_card(&mut self, req: &ShowRequest) -> Result<AgentDecision, AgentFailure> {
        let prompt = render_phase3(
            &self.templates,
            req.view,
            req.suggestion,
            req.matching,
            req.show_history,
        )?;
        let matching = req.matching;
        self.attempt_loop(Phase::ShowCard, prompt, move |parsed| match parsed {
            ParsedResponse::Show(show) if !matching.contains(show.card) => {
                Err(ParseError::WrongArity {
                    label: "SHOW",
                    expected: "one of your matching cards",
                    got: show.card.to_string(),
                })
            }
            _ => Ok(()),
        })
    }

    fn forced_accusation(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let prompt = render_forced_accusation(&self.templates, ctx)?;
        self.attempt_loop(Phase::Act, prompt, |parsed| match parsed {
            ParsedResponse::Move(m) if m.accusation.is_none() => Err(ParseError::WrongArity {
                label: "ACCUSATION",
                expected: "a full triple on a forced final turn",
                got: "NONE".to_string(),
            }),
            _ => Ok(()),
        })
    }
}

impl std::fmt::Debug for LlmAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LlmAgent")
            .field("seat", &self.seat)
            .field("model", &self.spec.model_id)
            .finish()
    }
}
