#![allow(dead_code)]

use std::path::PathBuf;

use stickcert::diagram::{parse_pd, Diagram};
use stickcert::geom::Polygon3;
use stickcert::store::{default_scale, read_coordinates};

pub const TEN_STICK: [&str; 2] = ["13n592", "15n41127"];
pub const ELEVEN_STICK: [&str; 9] =
    ["13n285", "13n293", "13n587", "13n607", "13n611", "13n835", "13n1177", "13n1192", "15n41126"];

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn polygon(name: &str) -> Polygon3 {
    read_coordinates(&fixtures().join(format!("{name}.tsv")), &default_scale()).unwrap()
}

pub fn moved_mirror() -> Polygon3 {
    read_coordinates(&fixtures().join("variants/13n592_mirror_moved.tsv"), &default_scale()).unwrap()
}

pub fn pd(rel: &str) -> Diagram {
    parse_pd(&std::fs::read_to_string(fixtures().join(rel)).unwrap()).unwrap()
}

pub fn labeled() -> Diagram {
    pd("diagrams/15n41127.pd")
}

pub fn labeling_text() -> String {
    std::fs::read_to_string(fixtures().join("diagrams/15n41127_labeling.txt")).unwrap()
}

pub fn corpus() -> Vec<(String, Diagram)> {
    let mut out: Vec<(String, Diagram)> = std::fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pd"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_str().unwrap().to_string();
            (name, parse_pd(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn read_small(name: &str) -> Polygon3 {
    read_coordinates(&fixtures().join(format!("small/{name}.tsv")), &default_scale()).unwrap()
}
