use std::path::PathBuf;

use oakit_cli::{parse_input, render, run_command, Document, Payload};
use oakit_core::lattice::{downset_lattice, poset_from_pairs, topology_from_opens, PointSet};
use oakit_core::overlap::OverlapReport;
use oakit_core::{Caps, Relation};
use proptest::prelude::*;
use serde_json::Value;

fn scratch(name: &str, text: &str) -> String {
    let dir: PathBuf = std::env::temp_dir().join(format!("oakit-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const C3: &str = "lattice C3\nelements 3\norder\n0 1\n1 2\nend\n";

const COUNTEREXAMPLE: &str = "\
map f : pow:2 -> pow:1
0 -> 0
1 -> 1
2 -> 0
3 -> 1
end
map g : pow:2 -> pow:1
0 -> 0
1 -> 1
2 -> 1
3 -> 1
end
map t : pow:2 -> pow:2
0 -> 0
1 -> 1
2 -> 3
3 -> 3
end
";

fn json(args: &[&str]) -> (i32, Value) {
    let mut argv: Vec<&str> = args.to_vec();
    argv.push("--json");
    let out = run_command(argv);
    (out.code, serde_json::from_str(&out.output).unwrap())
}

#[test]
fn replay_exits_zero_with_verdict() {
    let out = run_command(["replay", "equalizer"]);
    assert_eq!(out.code, 0);
    assert!(out.output.starts_with("verdict: NO_EQUALIZER\n"));
}

#[test]
fn three_chain_is_not_an_overlap_algebra() {
    let c3 = scratch("c3.lat", C3);
    let out = run_command(["check-oa", &c3]);
    assert_eq!(out.code, 1);
    assert!(out.output.contains("density: fails at [2, 1]"));
    let (code, v) = json(&["check-oa", &c3]);
    assert_eq!(code, 1);
    let report: OverlapReport = serde_json::from_value(v["result"][0]["report"].clone()).unwrap();
    assert_eq!(report.axiom("density").unwrap().witness, Some(vec![2, 1]));
}

#[test]
fn powerset_text_verdict() {
    let out = run_command(["check-oa", "pow:2"]);
    assert_eq!(out.code, 0);
    assert!(out.output.contains("o-algebra: yes (boolean crosscheck: yes)\n"));
}

#[test]
fn pow_functor_counts() {
    let (code, v) = json(&["pow-functor", "2", "2"]);
    assert_eq!(code, 0);
    assert_eq!((v["result"]["relations"].as_u64(), v["result"]["join_maps"].as_u64()), (Some(16), Some(16)));
}

#[test]
fn json_is_canonical_and_deterministic() {
    let a = run_command(["sublocales", "chain:3", "--json"]);
    let b = run_command(["sublocales", "chain:3", "--json"]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.output).unwrap();
    assert_eq!(oakit_cli::canonical(&v), a.output);
    fn sorted(v: &Value) -> bool {
        match v {
            Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                keys.windows(2).all(|w| w[0] < w[1]) && m.values().all(sorted)
            }
            Value::Array(xs) => xs.iter().all(sorted),
            _ => true,
        }
    }
    assert!(sorted(&v));
}

#[test]
fn exit_codes() {
    let maps = scratch("counterexample.maps", COUNTEREXAMPLE);
    assert_eq!(run_command(["weak-equalizer", &maps, "--pick", "t,f,g"]).code, 0);
    // f and t are not parallel.
    assert_eq!(run_command(["weak-equalizer", &maps]).code, 2);
    // g does not preserve binary meets, so there is no OFrm equalizer problem.
    assert_eq!(run_command(["equalizer", &maps]).code, 2);
    assert_eq!(run_command(["equalizer", &maps, "--search-bound", "4"]).code, 1);
    assert_eq!(run_command(["dagger", &maps]).code, 0);
    assert_eq!(run_command(["report-map", &maps]).code, 0);
    assert_eq!(run_command(["compose", &maps, "--pick", "t,f"]).code, 0);
    assert_eq!(run_command(["nuclei", "chain:3"]).code, 0);
    assert_eq!(run_command(["atoms", "chain:3"]).code, 1);
    assert_eq!(run_command(["atoms", "pow:3"]).code, 0);
    assert_eq!(run_command(["check-frame", "chain:4"]).code, 0);
    assert_eq!(run_command(["booleanize", "chain:4"]).code, 0);
    assert_eq!(run_command(["base", "chain:4", "pow:2"]).code, 0);
    assert_eq!(run_command(["product", "pow:1", "pow:2"]).code, 0);
    assert_eq!(run_command(["product", "chain:3"]).code, 2);
    assert_eq!(run_command(["zero-object"]).code, 0);
    assert_eq!(run_command(["no-such-command"]).code, 2);
    assert_eq!(run_command(["check-oa", "/nonexistent/file"]).code, 2);
    assert_eq!(run_command(["check-oa", "pow:3", "--cap", "4"]).code, 2);
    assert_eq!(run_command(["check-oa", "pow:2", "--base", "ji"]).code, 0);
    assert_eq!(run_command(["check-oa", "pow:2", "--base", "3"]).code, 2);
    assert_eq!(run_command(["--help"]).code, 0);
}

#[test]
fn pentagon_is_not_a_frame() {
    let n5 = scratch("n5.lat", "lattice N5\nelements 5\norder\n0 1\n1 2\n2 4\n0 3\n3 4\nend\n");
    let out = run_command(["check-frame", &n5]);
    assert_eq!(out.code, 1);
    assert!(out.output.contains("frame: no"));
    assert_eq!(run_command(["check-oa", &n5]).code, 1);
}

#[test]
fn non_join_map_is_rejected() {
    let f = scratch("bad.map", &format!("{C3}map f : C3 -> pow:1\n0 -> 0\n1 -> 1\n2 -> 0\nend\n"));
    let out = run_command(["dagger", &f]);
    assert_eq!(out.code, 2);
    assert!(out.output.contains("f(1 v 2) != f(1) v f(2)"), "{}", out.output);
}

#[test]
fn parse_errors_name_the_line() {
    let bad = scratch("bad.lat", "lattice A\nelements 2\norder\n0 1\n1 x\nend\n");
    let (code, v) = json(&["check-frame", &bad]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["line"], 5);
    assert_eq!(v["error"]["error"], "parse");
    let dup = scratch("dup.lat", &format!("{C3}{C3}"));
    assert_eq!(run_command(["check-frame", &dup]).code, 2);
}

#[test]
fn regular_opens_of_spaces() {
    let s = scratch("spaces.sp", "space S\npoints 2\nopen\nopen 1\nopen 0 1\nend\nspace T\npoints 3\nopen\nopen 0\nopen 1\nopen 0 1\nopen 0 1 2\nend\n");
    let (code, v) = json(&["regular-open", &s]);
    assert_eq!(code, 0);
    assert_eq!(v["result"][0]["opens"], serde_json::json!([0, 3]));
    assert_eq!(v["result"][1]["size"], 4);
}

fn arb_document() -> impl Strategy<Value = Document> {
    let caps = Caps::default();
    let lattice = (0usize..=4, any::<u16>()).prop_map(move |(n, bits)| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .map(|(_, p)| p)
            .collect();
        let p = poset_from_pairs(n, &pairs).unwrap();
        Payload::Lattice(downset_lattice(&p, &caps).unwrap())
    });
    let map = prop::collection::vec(0usize..8, 1..6).prop_map(|images| Payload::Map {
        source: "L".into(),
        target: "pow:3".into(),
        images,
    });
    let relation = (0usize..=4, 0usize..=4, any::<u64>())
        .prop_map(|(x, y, bits)| Payload::Relation(Relation::from_bits(x, y, bits)));
    let space = (0usize..=4, prop::collection::vec(any::<u64>(), 0..4)).prop_map(move |(n, seeds)| {
        let full: PointSet = (1 << n) - 1;
        let mut fam: Vec<PointSet> = vec![0, full];
        fam.extend(seeds.iter().map(|s| s & full));
        loop {
            let mut next = fam.clone();
            for &u in &fam {
                for &v in &fam {
                    next.extend([u | v, u & v]);
                }
            }
            next.sort_unstable();
            next.dedup();
            if next == fam {
                break;
            }
            fam = next;
        }
        Payload::Space(topology_from_opens(n, &fam, &caps).unwrap())
    });
    (
        "[A-Za-z][A-Za-z0-9_]{0,6}",
        prop_oneof![lattice, map, relation, space],
    )
        .prop_map(|(name, payload)| Document { name, payload })
}

proptest! {
    #[test]
    fn parse_render_round_trip(doc in arb_document()) {
        let text = render(&doc);
        let back = parse_input(&text, &Caps::default()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(render(&back), text);
    }
}
