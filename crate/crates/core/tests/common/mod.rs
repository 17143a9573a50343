#![allow(dead_code)]

use serde_json::{json, Value};
use toolplan::domain::{Args, GoldStep, ParamSpec, ParamType, Task, ToolSpec};

pub fn args(v: Value) -> Args {
    v.as_object().expect("object literal").clone()
}

pub fn string_tool(name: &str, params: &[&str]) -> ToolSpec {
    params.iter().fold(ToolSpec::new(name, format!("{name} tool")), |t, p| {
        t.with_param(ParamSpec::required(*p, ParamType::String))
    })
}

/// Three-step pipeline: transcribe -> translate -> speak, plus two decoys.
pub fn pipeline_task() -> Task {
    Task {
        id: "pipe-1".into(),
        instruction: "Transcribe meeting.wav, translate the transcript to French and read it aloud.".into(),
        catalog: vec![
            string_tool("speech_to_text", &["audio"]),
            string_tool("translate", &["text", "target_language"]),
            string_tool("text_to_speech", &["text"]),
            string_tool("summarize", &["text"]),
            string_tool("detect_language", &["text"]),
        ],
        gold_plan: vec![
            GoldStep::new("speech_to_text", args(json!({"audio": "meeting.wav"}))).with_output("transcript.txt"),
            GoldStep::new("translate", args(json!({"text": "transcript.txt", "target_language": "French"})))
                .with_output("transcript_fr.txt"),
            GoldStep::new("text_to_speech", args(json!({"text": "transcript_fr.txt"}))).with_output("speech_fr.wav"),
        ],
        gold_edges: vec![(0, 1), (1, 2)],
    }
}

/// Single-step banking task.
pub fn bank_task() -> Task {
    Task {
        id: "bank-1".into(),
        instruction: "I need to repay a debt of $1000 to my friend at Chase bank.".into(),
        catalog: vec![
            ToolSpec::new("pay_bill", "pay someone")
                .with_param(ParamSpec::required("amount", ParamType::Number))
                .with_param(ParamSpec::required("bank", ParamType::String)),
            string_tool("check_balance", &["account"]),
        ],
        gold_plan: vec![GoldStep::new("pay_bill", args(json!({"amount": 1000, "bank": "Chase bank"})))],
        gold_edges: vec![],
    }
}
