use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use afd_core::classify::{
    parse_llm_response, render_llm_prompt, train_baseline, AnalysisTask, BaselineModel, Classifier, ClassifyError,
    Explainer, Hyperparams, LabelSpace, LinearSoftmax, LlmBackend, LlmConfig, RemoteBackend, Shot, SparseVec,
};
use afd_core::fixtures::separable_corpus;
use afd_core::metrics::evaluate;
use afd_core::OutcomeLabel;
use proptest::prelude::*;
use url::Url;

fn outcome_space() -> LabelSpace {
    LabelSpace::default_for(AnalysisTask::Outcome)
}

#[test]
fn separable_eight_label_corpus() {
    let space = outcome_space();
    let data = separable_corpus(&space.labels, 200, 7);
    let (train, test) = data.split_at(150 * 8);
    let (model, report) = train_baseline(space.clone(), train, &[], Hyperparams::default()).unwrap();
    let pairs: Vec<(String, String)> =
        test.iter().map(|(t, gold)| (gold.clone(), model.predict(None, t).unwrap().label)).collect();
    let r = evaluate(&pairs, &space.labels).unwrap();
    assert!(r.macro_f1 >= 0.99, "macro-F1 {}", r.macro_f1);
    assert!(report.losses.last().unwrap() < &report.losses[0]);
}

/// Dense reimplementation of the regularized softmax objective.
fn dense_objective(w: &[f64], n_labels: usize, n_features: usize, xs: &[Vec<f64>], ys: &[usize], l2: f64) -> f64 {
    let row = n_features + 1;
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let z: Vec<f64> = (0..n_labels)
            .map(|l| (0..n_features).map(|i| w[l * row + i] * x[i]).sum::<f64>() + w[l * row + n_features])
            .collect();
        let lse = z.iter().map(|v| v.exp()).sum::<f64>().ln();
        total += lse - z[y];
    }
    let reg: f64 = (0..n_labels).flat_map(|l| (0..n_features).map(move |i| (l, i))).map(|(l, i)| w[l * row + i].powi(2)).sum();
    total / xs.len() as f64 + 0.5 * l2 * reg
}

#[test]
fn gradient_matches_central_differences() {
    let (n_labels, n_features, l2) = (3, 5, 0.05);
    let dense: Vec<Vec<f64>> = vec![
        vec![0.5, 0.0, 1.0, 0.0, 0.2],
        vec![0.0, 0.9, 0.1, 0.3, 0.0],
        vec![0.7, 0.7, 0.0, 0.0, 0.1],
        vec![0.0, 0.0, 0.4, 0.8, 0.6],
        vec![0.3, 0.1, 0.0, 0.9, 0.0],
        vec![0.2, 0.0, 0.0, 0.0, 1.0],
    ];
    let ys = vec![0, 1, 2, 1, 0, 2];
    let xs: Vec<SparseVec> = dense
        .iter()
        .map(|x| x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i as u32, *v)).collect())
        .collect();
    let mut model = LinearSoftmax::zeros(n_labels, n_features);
    for (k, w) in model.weights.iter_mut().enumerate() {
        *w = ((k * 37 % 11) as f64 - 5.0) / 7.0;
    }
    let (loss, grad) = model.loss_and_gradient(&xs, &ys, l2);
    let oracle = |w: &[f64]| dense_objective(w, n_labels, n_features, &dense, &ys, l2);
    assert!((loss - oracle(&model.weights)).abs() < 1e-12);
    let h = 1e-5;
    for k in 0..model.weights.len() {
        let mut plus = model.weights.clone();
        let mut minus = model.weights.clone();
        plus[k] += h;
        minus[k] -= h;
        let fd = (oracle(&plus) - oracle(&minus)) / (2.0 * h);
        let rel = (fd - grad[k]).abs() / fd.abs().max(grad[k].abs()).max(1e-8);
        assert!(rel <= 1e-4, "weight {k}: analytic {} numeric {fd} rel {rel}", grad[k]);
    }
}

#[test]
fn loss_decreases_with_small_learning_rate() {
    let space = outcome_space();
    let data = separable_corpus(&space.labels, 20, 3);
    let hp = Hyperparams { learning_rate: 0.1, epochs: 10, ..Hyperparams::default() };
    let (_, report) = train_baseline(space, &data, &[], hp).unwrap();
    assert!(report.losses.windows(2).all(|w| w[1] < w[0]), "{:?}", report.losses);
}

#[test]
fn training_and_prediction_are_deterministic() {
    let space = outcome_space();
    let data = separable_corpus(&space.labels, 10, 5);
    let hp = Hyperparams { epochs: 30, ..Hyperparams::default() };
    let (a, _) = train_baseline(space.clone(), &data, &[], hp).unwrap();
    let (b, _) = train_baseline(space, &data, &[], hp).unwrap();
    assert_eq!(a, b);
    let text = &data[3].0;
    assert_eq!(a.predict(None, text).unwrap(), a.predict(None, text).unwrap());
    assert_eq!(a.predict(None, "  "), Err(ClassifyError::EmptyText));
}

#[test]
fn single_label_corpus_is_insufficient() {
    let data: Vec<(String, String)> = (0..5).map(|i| (format!("text {i}"), "keep".to_string())).collect();
    let err = train_baseline(outcome_space(), &data, &[], Hyperparams::default()).unwrap_err();
    assert!(matches!(err, ClassifyError::InsufficientData(_)));
}

#[test]
fn model_file_round_trip() {
    let space = outcome_space();
    let data = separable_corpus(&space.labels, 10, 9);
    let (model, _) = train_baseline(space, &data, &[], Hyperparams { epochs: 20, ..Hyperparams::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.afd");
    model.save(&path).unwrap();
    let loaded = BaselineModel::load(&path).unwrap();
    assert_eq!(loaded.predict(None, &data[0].0).unwrap(), model.predict(None, &data[0].0).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn baseline_scores_are_distributions(text in "[a-z0-9 ]{1,60}") {
        static MODEL: std::sync::OnceLock<BaselineModel> = std::sync::OnceLock::new();
        let model = MODEL.get_or_init(|| {
            let space = outcome_space();
            let data = separable_corpus(&space.labels, 10, 1);
            train_baseline(space, &data, &[], Hyperparams { epochs: 20, ..Hyperparams::default() }).unwrap().0
        });
        prop_assume!(!text.trim().is_empty());
        let p = model.predict(None, &text).unwrap();
        p.validate(model.label_space()).unwrap();
        let sum: f64 = p.per_label_scores.unwrap().iter().map(|s| s.score).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn prompt_rendering_is_injective(
        a in ("[a-zA-Z ,\\n\\\\}]{0,12}", "[a-zA-Z ,\\n}]{1,12}"),
        b in ("[a-zA-Z ,\\n\\\\}]{0,12}", "[a-zA-Z ,\\n}]{1,12}"),
    ) {
        prop_assume!(a != b);
        prop_assert_ne!(render_llm_prompt(&a.0, &a.1, &[]), render_llm_prompt(&b.0, &b.1, &[]));
    }
}

#[test]
fn prompt_contains_template_and_labels() {
    let p = render_llm_prompt("T", "D", &[]);
    assert!(p.contains("You are a helpful knowledge management expert"));
    assert!(p.contains("Title: T") && p.contains("Discussion: D"));
    assert!(!p.contains("TOREPLACE_"));
    for l in ["keep", "delete", "merge", "redirect", "withdraw", "no consensus", "speedy keep", "speedy delete"] {
        assert!(p.contains(&format!("- \"{l}\":")), "{l}");
    }
    let shot = Shot { title: "A".into(), discussion: "B".into(), label: "keep".into(), explanation: "Sources found.".into() };
    let few = render_llm_prompt("T", "D", &[shot.clone(), shot]);
    let before = |s: &str| s[..s.rfind("INPUT:").unwrap()].matches("OUTPUT:").count();
    assert_eq!(before(&few), before(&p) + 2);
    assert!(few.ends_with("OUTPUT:\n"));
}

fn well_formed_responses() -> Vec<(String, OutcomeLabel, String)> {
    let spellings = [
        (OutcomeLabel::Delete, "delete"),
        (OutcomeLabel::Keep, "Keep"),
        (OutcomeLabel::Redirect, "redirect"),
        (OutcomeLabel::NoConsensus, "No Consensus"),
        (OutcomeLabel::Merge, "merge"),
        (OutcomeLabel::SpeedyKeep, "speedy keep"),
        (OutcomeLabel::SpeedyDelete, "Speedy delete"),
        (OutcomeLabel::Withdrawn, "withdraw"),
        (OutcomeLabel::Withdrawn, "withdrawn"),
        (OutcomeLabel::NoConsensus, "no-consensus"),
    ];
    let mut out = Vec::new();
    for (i, (label, spelled)) in spellings.iter().enumerate() {
        let e = format!("Reason {i} given. Participants agreed. Sources were checked.");
        let json = serde_json::json!({"Label": spelled, "Explanation": e}).to_string();
        out.push((json.clone(), *label, e.clone()));
        out.push((format!("```json\n{json}\n```"), *label, e.clone()));
        out.push((format!("Here is my answer:\n{json}\nHope this helps."), *label, e.clone()));
        out.push((serde_json::json!({"explanation": e, "label": spelled}).to_string(), *label, e.clone()));
        out.push((format!("{{\n    Label: {spelled},\n    Explanation: {e}\n}}"), *label, e.clone()));
    }
    out
}

#[test]
fn parse_round_trips_and_rejects() {
    let good = well_formed_responses();
    assert_eq!(good.len(), 50);
    for (raw, label, explanation) in &good {
        assert_eq!(parse_llm_response(raw).as_ref(), Ok(&(*label, explanation.clone())), "{raw}");
    }
    let bad = [
        "",
        "   ",
        "I cannot decide.",
        r#"{"Label": "maybe", "Explanation": "x"}"#,
        r#"{"Label": "spam"}"#,
        r#"{"Label": "", "Explanation": "x"}"#,
        r#"{"Verdict": "delete"}"#,
        r#"{"Explanation": "only reasons"}"#,
        "Label: transwiki",
        "```json\n{\"Label\": \"userfy\"}\n```",
        r#"{"Label": 5, "Explanation": "x"}"#,
        r#"{"Label": null}"#,
        "{ broken json",
        "The outcome is unclear.",
        r#"{"Label": "keep or delete", "Explanation": "x"}"#,
        r#"[1, 2, 3]"#,
        "The answer: {}",
        r#"{"label": "draftify", "explanation": "y"}"#,
        "OUTPUT: nothing",
        r#"{"Label": "relist", "Explanation": "needs more input"}"#,
    ];
    assert_eq!(bad.len(), 20);
    for raw in bad {
        assert!(parse_llm_response(raw).is_err(), "accepted {raw:?}");
    }
}

/// Serves canned JSON bodies and records request bodies and headers.
struct Stub {
    url: String,
    seen: Arc<Mutex<Vec<(String, Option<String>)>>>,
}

fn stub(status: u16, body: &'static str) -> Stub {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/predict", server.server_addr().to_ip().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut body_in = String::new();
            req.as_reader().read_to_string(&mut body_in).unwrap();
            let auth = req.headers().iter().find(|h| h.field.equiv("Authorization")).map(|h| h.value.to_string());
            log.lock().unwrap().push((body_in, auth));
            let resp = tiny_http::Response::from_string(body).with_status_code(status);
            let _ = req.respond(resp);
        }
    });
    Stub { url, seen }
}

#[test]
fn remote_backend_contract() {
    let space = outcome_space();
    let ok = stub(200, r#"{"predictions": [{"label": "keep", "score": 0.2}, {"label": "speedy delete", "score": 0.8}]}"#);
    let backend = RemoteBackend::new(Url::parse(&ok.url).unwrap(), space.clone(), Duration::from_secs(5));
    let p = backend.predict(Some("T"), "some text").unwrap();
    assert_eq!((p.label.as_str(), p.probability), ("speedy delete", 0.8));
    assert!(p.per_label_scores.is_none());
    let sent: serde_json::Value = serde_json::from_str(&ok.seen.lock().unwrap()[0].0).unwrap();
    assert_eq!(sent["task"], "outcome");
    assert_eq!(sent["labels"].as_array().unwrap().len(), 8);

    let spam = stub(200, r#"{"predictions": [{"label": "spam", "score": 0.9}]}"#);
    let backend = RemoteBackend::new(Url::parse(&spam.url).unwrap(), space.clone(), Duration::from_secs(5));
    assert!(matches!(backend.predict(None, "x"), Err(ClassifyError::LabelSpaceMismatch { .. })));

    let down = stub(503, "busy");
    let backend = RemoteBackend::new(Url::parse(&down.url).unwrap(), space, Duration::from_secs(5));
    assert!(matches!(backend.predict(None, "x"), Err(ClassifyError::BackendUnavailable(_))));
}

#[test]
fn llm_backend_against_stub() {
    let s = stub(
        200,
        r#"{"choices": [{"message": {"role": "assistant", "content": "```json\n{\"Label\": \"speedy delete\", \"Explanation\": \"No notability shown.\"}\n```"}}]}"#,
    );
    let config = LlmConfig { endpoint: s.url.clone(), ..LlmConfig::default() };
    let llm = LlmBackend::with_key(config, "test-key");
    let p = llm.predict(Some("Some Article"), "Delete, no sources.").unwrap();
    assert_eq!(p.label, "speedy delete");
    assert_eq!(p.probability, 1.0);
    assert_eq!(p.explanation.as_deref(), Some("No notability shown."));
    let e = llm.explain(Some("Some Article"), "Delete, no sources.", "delete").unwrap();
    assert_eq!(e, "No notability shown.");
    let seen = s.seen.lock().unwrap();
    let body: serde_json::Value = serde_json::from_str(&seen[0].0).unwrap();
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["max_tokens"], 512);
    assert!(body["messages"][0]["content"].as_str().unwrap().contains("Title: Some Article"));
    assert_eq!(seen[0].1.as_deref(), Some("Bearer test-key"));
}

#[test]
fn llm_without_key_is_not_configured() {
    let config = LlmConfig { api_key_env: "AFD_TEST_SURELY_UNSET_KEY".into(), ..LlmConfig::default() };
    assert!(matches!(LlmBackend::from_env(config), Err(ClassifyError::NotConfigured(_))));
}
