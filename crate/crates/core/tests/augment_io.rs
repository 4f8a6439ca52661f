mod common;

use common::graph;
use graphprop::augment::{augment_corpus, build_synthetic_corpus, default_synthetic_specs, mixup, MixupSpec};
use graphprop::generate::{generate, GraphModel};
use graphprop::io::{load_corpus, read_jsonl, save_jsonl, write_jsonl, CorpusFormat};
use graphprop::{Corpus, Graph};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jsonl_round_trip(gs in proptest::collection::vec(graph(1, 12), 1..6), label in proptest::option::of(-5i64..5)) {
        let graphs: Vec<Graph> = gs
            .into_iter()
            .enumerate()
            .map(|(i, g)| g.with_id(format!("g{i}")).with_domain(if i % 2 == 0 { "even" } else { "odd" }).with_label(label))
            .collect();
        let corpus = Corpus::new(graphs);
        let mut buf = Vec::new();
        write_jsonl(&corpus, &mut buf).unwrap();
        let back = read_jsonl(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), corpus.len());
        for (a, b) in corpus.graphs().iter().zip(back.graphs()) {
            prop_assert_eq!(a.id(), b.id());
            prop_assert_eq!(a.domain(), b.domain());
            prop_assert_eq!(a.edges(), b.edges());
            prop_assert_eq!(a.label(), b.label());
        }
    }

    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal(g in graph(1, 16)) {
        let a = g.adjacency();
        prop_assert!(a.is_symmetric(0.0));
        prop_assert!((0..g.n()).all(|i| a[(i, i)] == 0.0));
    }

    #[test]
    fn generators_are_pure(seed in any::<u64>(), n in 5usize..30) {
        for model in [
            GraphModel::ErdosRenyi { n, p: 0.3 },
            GraphModel::BarabasiAlbert { n, m: 2 },
            GraphModel::WattsStrogatz { n, k: 4, beta: 0.2 },
        ] {
            prop_assert_eq!(generate(model, seed).unwrap(), generate(model, seed).unwrap());
        }
    }

    #[test]
    fn mixup_identities(g1 in graph(1, 12), g2 in graph(1, 12), lambda in 0.0f64..=1.0, seed in any::<u64>()) {
        let n = g1.n().max(g2.n());
        let one = mixup(&g1, &g2, &MixupSpec::threshold(1.0)).unwrap();
        let zero = mixup(&g1, &g2, &MixupSpec::threshold(0.0)).unwrap();
        prop_assert_eq!(one.n(), n);
        prop_assert_eq!(zero.n(), n);
        // Padding only adds isolated nodes.
        prop_assert_eq!(one.edges(), g1.edges());
        prop_assert_eq!(zero.edges(), g2.edges());
        // Bernoulli resolution is exact at the endpoints too.
        let b1 = mixup(&g1, &g2, &MixupSpec::bernoulli(1.0, seed)).unwrap();
        prop_assert_eq!(b1.edges(), g1.edges());
        let same = mixup(&g1, &g1, &MixupSpec::threshold(lambda)).unwrap();
        prop_assert_eq!(same.edges(), g1.edges());
        let mixed = mixup(&g1, &g2, &MixupSpec::bernoulli(lambda, seed)).unwrap();
        prop_assert!(mixed.adjacency().is_symmetric(0.0));
        prop_assert_eq!(mixed.provenance().unwrap().lambda, lambda);
    }
}

#[test]
fn augmented_corpus_survives_a_file_round_trip() {
    let corpus = build_synthetic_corpus(&default_synthetic_specs(30, 6, 10, 2)).unwrap();
    let aug = augment_corpus(&corpus, 12, &MixupSpec::bernoulli(0.4, 9), 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aug.jsonl");
    save_jsonl(&aug, &path).unwrap();
    let back = load_corpus(&path, CorpusFormat::Jsonl).unwrap();
    assert_eq!(back.len(), 42);
    for (a, b) in aug.graphs().iter().zip(back.graphs()) {
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.provenance(), b.provenance());
    }
    // Same seed, same augmentation.
    let again = augment_corpus(&corpus, 12, &MixupSpec::bernoulli(0.4, 9), 5).unwrap();
    assert!(aug.graphs().iter().zip(again.graphs()).all(|(a, b)| a.edges() == b.edges()));
}

#[test]
fn edge_list_directory_uses_subdirectories_as_domains() {
    let dir = tempfile::tempdir().unwrap();
    for (domain, name, body) in [("chem", "a.txt", "0 1\n1 2\n"), ("chem", "b.txt", "x y\n"), ("social", "c.txt", "7 9\n9 3\n3 7\n")] {
        let d = dir.path().join(domain);
        std::fs::create_dir_all(&d).unwrap();
        std::fs::write(d.join(name), body).unwrap();
    }
    let corpus = load_corpus(dir.path(), CorpusFormat::EdgeListDir).unwrap();
    assert_eq!(corpus.len(), 3);
    assert_eq!(corpus.domain_count(), 2);
    let tri = corpus.graphs().iter().find(|g| g.domain() == "social").unwrap();
    assert_eq!((tri.n(), tri.edge_count()), (3, 3));
}

#[test]
fn malformed_records_report_the_line() {
    let text = "{\"n\": 2, \"edges\": [[0, 1]]}\n{\"n\": 2, \"edges\": [[0, 0]]}\n";
    let err = read_jsonl(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("g2"), "{err}");
    let err = read_jsonl("{\"n\": 2,\n".as_bytes()).unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
}
