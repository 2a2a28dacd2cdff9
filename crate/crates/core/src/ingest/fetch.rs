//! Best-effort article retrieval from URLs.
//!
//! The extraction heuristic is deliberately small: the first `<h1>` (or the
//! `<title>` when no heading exists) becomes the title, the first paragraph
//! the lead, and all remaining paragraphs the body. Text inside `script`,
//! `style`, `nav`, `header`, `footer`, `aside`, `form`, and `figure` is skipped.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{normalize_whitespace, ArticleInput, IngestError, Orientation, Topic, TopicInput};

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub topic_id: String,
    pub event_description: String,
    pub timeout: Duration,
    pub max_concurrency: usize,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            topic_id: "fetched".into(),
            event_description: String::new(),
            timeout: Duration::from_secs(10),
            max_concurrency: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchFailure {
    pub url: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct FetchOutcome {
    pub topic: Topic,
    pub failures: Vec<FetchFailure>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedPage {
    pub title: String,
    pub lead: String,
    pub body: String,
}

/// Retrieves every URL (concurrently, bounded by `max_concurrency`) and builds
/// a topic from the pages that could be fetched and extracted.
pub fn fetch_topic(urls: &[String], config: &FetchConfig) -> Result<FetchOutcome, IngestError> {
    if urls.is_empty() {
        return Err(IngestError::NoUrls);
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(config.timeout))
        .build()
        .into();

    let workers = config.max_concurrency.max(1);
    let mut results: Vec<Option<Result<ExtractedPage, String>>> = vec![None; urls.len()];
    for (chunk_idx, chunk) in urls.chunks(workers).enumerate() {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|url| {
                    let agent = agent.clone();
                    scope.spawn(move || fetch_one(&agent, url))
                })
                .collect();
            for (i, h) in handles.into_iter().enumerate() {
                let r = h
                    .join()
                    .unwrap_or_else(|_| Err("fetch worker panicked".into()));
                results[chunk_idx * workers + i] = Some(r);
            }
        });
    }

    let mut articles = Vec::new();
    let mut failures = Vec::new();
    for (i, (url, result)) in urls.iter().zip(results).enumerate() {
        match result.expect("every slot filled") {
            Ok(page) => articles.push(ArticleInput {
                id: format!("a{i}"),
                url: Some(url.clone()),
                outlet_name: outlet_from_url(url),
                outlet_orientation: Orientation::Unknown,
                title: page.title,
                lead: page.lead,
                body: page.body,
            }),
            Err(reason) => failures.push(FetchFailure {
                url: url.clone(),
                reason,
            }),
        }
    }
    if articles.is_empty() {
        return Err(IngestError::AllFetchesFailed(failures));
    }
    let topic = Topic::from_input(TopicInput {
        topic_id: config.topic_id.clone(),
        event_description: config.event_description.clone(),
        articles,
    })?;
    Ok(FetchOutcome { topic, failures })
}

fn fetch_one(agent: &ureq::Agent, url: &str) -> Result<ExtractedPage, String> {
    let mut response = agent.get(url).call().map_err(|e| e.to_string())?;
    let html = response
        .body_mut()
        .read_to_string()
        .map_err(|e| e.to_string())?;
    let page = extract_page(&html);
    if page.title.is_empty() && page.lead.is_empty() {
        return Err("no article text found".into());
    }
    Ok(page)
}

fn outlet_from_url(url: &str) -> String {
    url::Url::parse(url)
        .ok()
        .and_then(|u| {
            u.host_str()
                .map(|h| h.trim_start_matches("www.").to_string())
        })
        .unwrap_or_else(|| "unknown".into())
}

const SKIPPED: &[&str] = &[
    "script", "style", "nav", "header", "footer", "aside", "form", "figure", "noscript",
];

#[derive(Clone, Copy, PartialEq)]
enum Capture {
    None,
    Title,
    Heading,
    Paragraph,
}

/// Reduces an HTML page to title, lead, and body.
pub fn extract_page(html: &str) -> ExtractedPage {
    let mut h1: Option<String> = None;
    let mut title_tag: Option<String> = None;
    let mut paragraphs: Vec<String> = Vec::new();

    let mut skip_depth = 0usize;
    let mut capture = Capture::None;
    let mut buf = String::new();
    let mut rest = html;

    while let Some(lt) = rest.find('<') {
        if capture != Capture::None && skip_depth == 0 {
            buf.push_str(&rest[..lt]);
        }
        rest = &rest[lt..];
        if rest.starts_with("<!--") {
            rest = rest.find("-->").map_or("", |e| &rest[e + 3..]);
            continue;
        }
        let Some(gt) = rest.find('>') else { break };
        let tag = &rest[1..gt];
        rest = &rest[gt + 1..];

        let closing = tag.starts_with('/');
        let name: String = tag
            .trim_start_matches('/')
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();

        if SKIPPED.contains(&name.as_str()) {
            if closing {
                skip_depth = skip_depth.saturating_sub(1);
            } else if !tag.ends_with('/') {
                skip_depth += 1;
            }
            continue;
        }
        if skip_depth > 0 {
            continue;
        }

        let kind = match name.as_str() {
            "title" => Capture::Title,
            "h1" => Capture::Heading,
            "p" => Capture::Paragraph,
            "br" => {
                buf.push(' ');
                continue;
            }
            _ => continue,
        };
        if !closing {
            if capture == Capture::Paragraph && kind == Capture::Paragraph {
                // Unclosed <p> followed by another <p>.
                push_nonempty(&mut paragraphs, &buf);
            }
            capture = kind;
            buf.clear();
        } else if capture == kind {
            let text = normalize_whitespace(&decode_entities(&buf));
            match kind {
                Capture::Title if title_tag.is_none() => title_tag = Some(text),
                Capture::Heading if h1.is_none() => h1 = Some(text),
                Capture::Paragraph => push_nonempty(&mut paragraphs, &text),
                _ => {}
            }
            capture = Capture::None;
            buf.clear();
        }
    }
    if capture == Capture::Paragraph {
        push_nonempty(
            &mut paragraphs,
            &normalize_whitespace(&decode_entities(&buf)),
        );
    }

    let mut paragraphs = paragraphs.into_iter();
    ExtractedPage {
        title: h1
            .filter(|t| !t.is_empty())
            .or(title_tag)
            .unwrap_or_default(),
        lead: paragraphs.next().unwrap_or_default(),
        body: paragraphs.collect::<Vec<_>>().join(" "),
    }
}

fn push_nonempty(out: &mut Vec<String>, text: &str) {
    let text = normalize_whitespace(&decode_entities(text));
    if !text.is_empty() {
        out.push(text);
    }
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        rest = &rest[amp..];
        let decoded = rest.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let entity = &rest[1..semi];
            let c = match entity {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                "rsquo" => Some('\u{2019}'),
                "lsquo" => Some('\u{2018}'),
                "rdquo" => Some('\u{201d}'),
                "ldquo" => Some('\u{201c}'),
                "mdash" => Some('\u{2014}'),
                "ndash" => Some('\u{2013}'),
                e if e.starts_with("#x") || e.starts_with("#X") => u32::from_str_radix(&e[2..], 16)
                    .ok()
                    .and_then(char::from_u32),
                e if e.starts_with('#') => e[1..].parse().ok().and_then(char::from_u32),
                _ => None,
            }?;
            Some((c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &rest[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}
