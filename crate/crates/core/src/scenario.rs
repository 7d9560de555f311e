//! Line-based scenario files.
//!
//! One command per line, tokens separated by whitespace, `#` starts a
//! comment. See [`GRAMMAR`] for the full command list.

use std::fmt;

use thiserror::Error;

use crate::governance::AssignmentStatus;
use crate::ids::{AssignmentId, CommitmentId, DetailKey, NetworkId, ServiceId};
use crate::model::{Privacy, Responsibility, Tick, Verb};
use crate::scheduler::Policy;

pub const GRAMMAR: &str = "\
policy <fcfs|priority>
network <name>
purpose <network> <token>
signup <service> <network> <accept|reject>
assign <service> <resp1|resp2|resp3|resp4|resp5>
assignment <id> <service>
finish-assignment <id> <complete|failed>
detail <key> <owner> <network> <public|private> <value>
ttl <ticks>
submit <cid> <service> collect <detail> <purpose> [options]
submit <cid> <service> post <detail> <true|false> [value] [options]
submit <cid> <service> tamper <detail> [value] [options]
submit <cid> <service> signoff <service> [network] [options]
submit <cid> <service> reveal <detail> <requester> [options]
    options: prio=<n> if=<guard> business=<composition>
guard <name> <true|false>
complete <cid> [failed]
tick [n]
snapshot
";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionSpec {
    Collect { detail: DetailKey, purpose: String },
    Post { detail: DetailKey, veracity: bool, value: Option<String> },
    Tamper { detail: DetailKey, value: Option<String> },
    Signoff { service: ServiceId, network: Option<NetworkId> },
    Reveal { detail: DetailKey, requester: ServiceId },
}

impl ActionSpec {
    pub fn verb(&self) -> Verb {
        match self {
            ActionSpec::Collect { .. } => Verb::Collect,
            ActionSpec::Post { .. } => Verb::Post,
            ActionSpec::Tamper { .. } => Verb::Tamper,
            ActionSpec::Signoff { .. } => Verb::Signoff,
            ActionSpec::Reveal { .. } => Verb::Reveal,
        }
    }

    /// Target token as written in the scenario.
    pub fn target(&self) -> &str {
        match self {
            ActionSpec::Collect { detail, .. }
            | ActionSpec::Post { detail, .. }
            | ActionSpec::Tamper { detail, .. }
            | ActionSpec::Reveal { detail, .. } => detail.as_str(),
            ActionSpec::Signoff { service, .. } => service.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmitCommand {
    pub id: CommitmentId,
    pub service: ServiceId,
    pub action: ActionSpec,
    pub priority: Option<u32>,
    pub guard: Option<String>,
    /// Composition creditor; makes the commitment a business commitment.
    pub business: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Policy(Policy),
    Network(NetworkId),
    Purpose { network: NetworkId, token: String },
    Signup { service: ServiceId, network: NetworkId, accept: bool },
    Assign { service: ServiceId, responsibility: Responsibility },
    Assignment { id: AssignmentId, service: ServiceId },
    FinishAssignment { id: AssignmentId, status: AssignmentStatus },
    Detail {
        key: DetailKey,
        owner: ServiceId,
        network: NetworkId,
        privacy: Privacy,
        value: String,
    },
    Ttl(Tick),
    Submit(SubmitCommand),
    Guard { name: String, value: bool },
    Complete { id: CommitmentId, failed: bool },
    Tick(Tick),
    Snapshot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located {
    /// 1-based source line.
    pub line: usize,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    pub source: String,
    pub commands: Vec<Located>,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown command `{0}`")]
    UnknownVerb(String),
    #[error("`{verb}` expects {expected}")]
    Arity { verb: String, expected: &'static str },
    #[error("expected {expected}, found `{found}`")]
    BadToken { expected: &'static str, found: String },
    #[error("unknown option `{0}`")]
    UnknownOption(String),
    #[error("option `{0}` given twice")]
    DuplicateOption(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{source_name}:{line}:{column}: {kind}")]
pub struct ParseError {
    pub source_name: String,
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct LineParser<'a> {
    verb: Token<'a>,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

type Res<T> = Result<T, (usize, ParseErrorKind)>;

impl<'a> LineParser<'a> {
    fn arity(&self, expected: &'static str) -> (usize, ParseErrorKind) {
        let column = self.tokens.last().map_or(self.end_column, |t| t.column);
        (
            column,
            ParseErrorKind::Arity {
                verb: self.verb.text.to_owned(),
                expected,
            },
        )
    }

    /// Exactly `n` positional tokens.
    fn exact(&self, n: usize, expected: &'static str) -> Res<Vec<Token<'a>>> {
        if self.tokens.len() != n {
            let column = self
                .tokens
                .get(n)
                .map_or(self.end_column, |t| t.column);
            return Err((
                column,
                ParseErrorKind::Arity {
                    verb: self.verb.text.to_owned(),
                    expected,
                },
            ));
        }
        Ok(self.tokens.clone())
    }
}

fn choice<T: Copy>(tok: Token<'_>, expected: &'static str, options: &[(&str, T)]) -> Res<T> {
    options
        .iter()
        .find(|(name, _)| *name == tok.text)
        .map(|(_, v)| *v)
        .ok_or((
            tok.column,
            ParseErrorKind::BadToken {
                expected,
                found: tok.text.to_owned(),
            },
        ))
}

fn number<T: std::str::FromStr>(tok: Token<'_>, text: &str, expected: &'static str) -> Res<T> {
    text.parse().map_err(|_| {
        (
            tok.column,
            ParseErrorKind::BadToken {
                expected,
                found: tok.text.to_owned(),
            },
        )
    })
}

fn boolean(tok: Token<'_>) -> Res<bool> {
    choice(tok, "true|false", &[("true", true), ("false", false)])
}

fn policy(tok: Token<'_>) -> Res<Policy> {
    choice(tok, "fcfs|priority", &[("fcfs", Policy::Fcfs), ("priority", Policy::Priority)])
}

fn responsibility(tok: Token<'_>) -> Res<Responsibility> {
    choice(
        tok,
        "resp1|resp2|resp3|resp4|resp5",
        &[
            ("resp1", Responsibility::Resp1),
            ("resp2", Responsibility::Resp2),
            ("resp3", Responsibility::Resp3),
            ("resp4", Responsibility::Resp4),
            ("resp5", Responsibility::Resp5),
        ],
    )
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

pub fn parse(text: &str) -> Result<Scenario, ParseError> {
    parse_named("<input>", text)
}

pub fn parse_named(source: &str, text: &str) -> Result<Scenario, ParseError> {
    let mut commands = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let mut tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let verb = tokens.remove(0);
        let lp = LineParser {
            verb,
            tokens,
            end_column: raw.split('#').next().unwrap_or("").trim_end().chars().count() + 1,
        };
        let command = parse_line(&lp).map_err(|(column, kind)| ParseError {
            source_name: source.to_owned(),
            line: idx + 1,
            column,
            kind,
        })?;
        commands.push(Located {
            line: idx + 1,
            command,
        });
    }
    Ok(Scenario {
        source: source.to_owned(),
        commands,
    })
}

fn parse_line(lp: &LineParser<'_>) -> Res<Command> {
    let t = |i: usize| lp.tokens[i].text;
    Ok(match lp.verb.text {
        "policy" => Command::Policy(policy(lp.exact(1, "a policy")?[0])?),
        "network" => {
            lp.exact(1, "a network name")?;
            Command::Network(t(0).into())
        }
        "purpose" => {
            lp.exact(2, "<network> <token>")?;
            Command::Purpose {
                network: t(0).into(),
                token: t(1).into(),
            }
        }
        "signup" => {
            let toks = lp.exact(3, "<service> <network> <accept|reject>")?;
            Command::Signup {
                service: t(0).into(),
                network: t(1).into(),
                accept: choice(toks[2], "accept|reject", &[("accept", true), ("reject", false)])?,
            }
        }
        "assign" => {
            let toks = lp.exact(2, "<service> <resp1..resp5>")?;
            Command::Assign {
                service: t(0).into(),
                responsibility: responsibility(toks[1])?,
            }
        }
        "assignment" => {
            lp.exact(2, "<id> <service>")?;
            Command::Assignment {
                id: t(0).into(),
                service: t(1).into(),
            }
        }
        "finish-assignment" => {
            let toks = lp.exact(2, "<id> <complete|failed>")?;
            Command::FinishAssignment {
                id: t(0).into(),
                status: choice(
                    toks[1],
                    "complete|failed",
                    &[("complete", AssignmentStatus::Complete), ("failed", AssignmentStatus::Failed)],
                )?,
            }
        }
        "detail" => {
            let toks = lp.exact(5, "<key> <owner> <network> <public|private> <value>")?;
            Command::Detail {
                key: t(0).into(),
                owner: t(1).into(),
                network: t(2).into(),
                privacy: choice(
                    toks[3],
                    "public|private",
                    &[("public", Privacy::Public), ("private", Privacy::Private)],
                )?,
                value: t(4).into(),
            }
        }
        "ttl" => {
            let toks = lp.exact(1, "a tick count")?;
            Command::Ttl(number(toks[0], t(0), "a non-negative integer")?)
        }
        "submit" => Command::Submit(parse_submit(lp)?),
        "guard" => {
            let toks = lp.exact(2, "<name> <true|false>")?;
            Command::Guard {
                name: t(0).into(),
                value: boolean(toks[1])?,
            }
        }
        "complete" => match lp.tokens.len() {
            1 => Command::Complete {
                id: t(0).into(),
                failed: false,
            },
            2 => {
                choice(lp.tokens[1], "failed", &[("failed", ())])?;
                Command::Complete {
                    id: t(0).into(),
                    failed: true,
                }
            }
            _ => return Err(lp.arity("<cid> [failed]")),
        },
        "tick" => match lp.tokens.len() {
            0 => Command::Tick(1),
            1 => Command::Tick(number(lp.tokens[0], t(0), "a non-negative integer")?),
            _ => return Err(lp.arity("at most one tick count")),
        },
        "snapshot" => {
            lp.exact(0, "no arguments")?;
            Command::Snapshot
        }
        other => return Err((lp.verb.column, ParseErrorKind::UnknownVerb(other.to_owned()))),
    })
}

fn parse_submit(lp: &LineParser<'_>) -> Res<SubmitCommand> {
    const USAGE: &str = "<cid> <service> <verb> <target> [arg...] [options]";
    let mut positional = Vec::new();
    let mut priority = None;
    let mut guard = None;
    let mut business = None;
    for tok in &lp.tokens {
        let Some((key, value)) = tok.text.split_once('=') else {
            positional.push(*tok);
            continue;
        };
        let slot_taken = match key {
            "prio" => priority
                .replace(number::<u32>(*tok, value, "prio=<non-negative integer>")?)
                .is_some(),
            "if" => guard.replace(value.to_owned()).is_some(),
            "business" => business.replace(value.to_owned()).is_some(),
            _ => return Err((tok.column, ParseErrorKind::UnknownOption(tok.text.to_owned()))),
        };
        if slot_taken {
            return Err((tok.column, ParseErrorKind::DuplicateOption(key.to_owned())));
        }
    }
    if positional.len() < 4 {
        return Err(lp.arity(USAGE));
    }
    let verb = choice(
        positional[2],
        "collect|post|tamper|signoff|reveal",
        &[
            ("collect", Verb::Collect),
            ("post", Verb::Post),
            ("tamper", Verb::Tamper),
            ("signoff", Verb::Signoff),
            ("reveal", Verb::Reveal),
        ],
    )?;
    let target = positional[3].text;
    let args = &positional[4..];
    let too_many = |expected: &'static str, max: usize| -> Res<()> {
        if args.len() > max {
            return Err((
                args[max].column,
                ParseErrorKind::Arity {
                    verb: format!("submit … {}", verb.token()),
                    expected,
                },
            ));
        }
        Ok(())
    };
    let missing = |expected: &'static str| {
        (
            lp.end_column,
            ParseErrorKind::Arity {
                verb: format!("submit … {}", verb.token()),
                expected,
            },
        )
    };
    let action = match verb {
        Verb::Collect => {
            too_many("<detail> <purpose>", 1)?;
            let purpose = args.first().ok_or_else(|| missing("<detail> <purpose>"))?;
            ActionSpec::Collect {
                detail: target.into(),
                purpose: purpose.text.into(),
            }
        }
        Verb::Post => {
            too_many("<detail> <true|false> [value]", 2)?;
            let veracity = args.first().ok_or_else(|| missing("<detail> <true|false> [value]"))?;
            ActionSpec::Post {
                detail: target.into(),
                veracity: boolean(*veracity)?,
                value: args.get(1).map(|t| t.text.to_owned()),
            }
        }
        Verb::Tamper => {
            too_many("<detail> [value]", 1)?;
            ActionSpec::Tamper {
                detail: target.into(),
                value: args.first().map(|t| t.text.to_owned()),
            }
        }
        Verb::Signoff => {
            too_many("<service> [network]", 1)?;
            ActionSpec::Signoff {
                service: target.into(),
                network: args.first().map(|t| t.text.into()),
            }
        }
        Verb::Reveal => {
            too_many("<detail> <requester>", 1)?;
            let requester = args.first().ok_or_else(|| missing("<detail> <requester>"))?;
            ActionSpec::Reveal {
                detail: target.into(),
                requester: requester.text.into(),
            }
        }
    };
    Ok(SubmitCommand {
        id: positional[0].text.into(),
        service: positional[1].text.into(),
        action,
        priority,
        guard,
        business,
    })
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Policy(p) => write!(f, "policy {p}"),
            Command::Network(n) => write!(f, "network {n}"),
            Command::Purpose { network, token } => write!(f, "purpose {network} {token}"),
            Command::Signup { service, network, accept } => {
                write!(f, "signup {service} {network} {}", if *accept { "accept" } else { "reject" })
            }
            Command::Assign { service, responsibility } => write!(f, "assign {service} {responsibility}"),
            Command::Assignment { id, service } => write!(f, "assignment {id} {service}"),
            Command::FinishAssignment { id, status } => {
                let s = match status {
                    AssignmentStatus::Failed => "failed",
                    _ => "complete",
                };
                write!(f, "finish-assignment {id} {s}")
            }
            Command::Detail { key, owner, network, privacy, value } => {
                let p = match privacy {
                    Privacy::Public => "public",
                    Privacy::Private => "private",
                };
                write!(f, "detail {key} {owner} {network} {p} {value}")
            }
            Command::Ttl(n) => write!(f, "ttl {n}"),
            Command::Submit(s) => {
                write!(f, "submit {} {} {} {}", s.id, s.service, s.action.verb(), s.action.target())?;
                match &s.action {
                    ActionSpec::Collect { purpose, .. } => write!(f, " {purpose}")?,
                    ActionSpec::Post { veracity, value, .. } => {
                        write!(f, " {veracity}")?;
                        if let Some(v) = value {
                            write!(f, " {v}")?;
                        }
                    }
                    ActionSpec::Tamper { value, .. } => {
                        if let Some(v) = value {
                            write!(f, " {v}")?;
                        }
                    }
                    ActionSpec::Signoff { network, .. } => {
                        if let Some(n) = network {
                            write!(f, " {n}")?;
                        }
                    }
                    ActionSpec::Reveal { requester, .. } => write!(f, " {requester}")?,
                }
                if let Some(p) = s.priority {
                    write!(f, " prio={p}")?;
                }
                if let Some(g) = &s.guard {
                    write!(f, " if={g}")?;
                }
                if let Some(b) = &s.business {
                    write!(f, " business={b}")?;
                }
                Ok(())
            }
            Command::Guard { name, value } => write!(f, "guard {name} {value}"),
            Command::Complete { id, failed } => {
                write!(f, "complete {id}")?;
                if *failed {
                    write!(f, " failed")?;
                }
                Ok(())
            }
            Command::Tick(n) => write!(f, "tick {n}"),
            Command::Snapshot => write!(f, "snapshot"),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.commands {
            writeln!(f, "{}", c.command)?;
        }
        Ok(())
    }
}
