use narrative_core::community::{assign_from_matrix, ConsensusConfig, CooccurrenceMatrix};
use narrative_core::embedding::{cosine, hashed_embedding, EmbeddingStore};
use narrative_core::evaluation::{match_relationships, GoldEdge, GoldGraph, GoldNode, MatchMode};
use narrative_core::interchange::{
    admit_tuple, hyperedge_decompose, CorpusStats, ExtractionTuple, HyperEdge, IngestConfig,
    Pattern, PhraseRef, PhraseTable, RoleArg,
};
use narrative_core::interchange::{post_word_frequency, write_corpus};
use narrative_core::network::{
    components, ego_network, keystone_decomposition, power_network, NarrativeNetwork, NetworkEdge,
    NetworkNode,
};
use narrative_core::ranking::rank_entities;
use narrative_core::significance::{
    build_contexts, score_context, ContextKey, ScoringConfig, SentenceIndex, VerbScore,
};
use narrative_core::subnode::{alpha_chain, build_subnodes, LabelScore, SubnodeConfig};
use narrative_core::supernode::build_supernodes;
use narrative_core::synth::{demo_framework, generate_synthetic_corpus};
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

const WORDS: &[&str] = &[
    "pizza", "comet", "clinton", "email", "podesta", "bridge", "lane", "kelly", "the", "secret",
];
const VERBS: &[&str] = &[
    "is", "has", "hide", "hid", "own", "closed", "closing", "send", "met", "abuse",
];

fn phrase_strategy() -> impl Strategy<Value = PhraseRef> {
    (
        prop::collection::vec(0..WORDS.len(), 1..4),
        any::<bool>(),
        1u8..12,
    )
        .prop_map(|(ws, resolved, _)| {
            let text = ws.iter().map(|&i| WORDS[i]).collect::<Vec<_>>().join(" ");
            let head = WORDS[*ws.last().unwrap()];
            let mut p = PhraseRef::new(format!("p:{text}"), text, head);
            p.resolved_from_pronoun = resolved;
            p
        })
}

prop_compose! {
    fn tuple_strategy()(
        a in phrase_strategy(),
        b in phrase_strategy(),
        verbs in prop::collection::vec(0..VERBS.len(), 1..3),
        doc in 0u8..6,
        sentence in 0u64..8,
        len in 3u32..90,
        gap in 0u32..40,
    ) -> ExtractionTuple {
        ExtractionTuple {
            arg1: a,
            rel_text: verbs.iter().map(|&v| VERBS[v]).collect::<Vec<_>>().join(" "),
            rel_verbs: verbs.iter().map(|&v| VERBS[v].to_string()).collect(),
            arg2: b,
            pattern: Pattern::Svo,
            doc_id: format!("d{doc}"),
            post_id: format!("d{doc}"),
            sentence_id: sentence,
            timestamp: None,
            token_span: (0, len),
            sentence_tokens: Some(len),
            arg1_span: Some((0, 1)),
            arg2_span: Some((1 + gap, 2 + gap)),
        }
    }
}

fn corpus() -> impl Strategy<Value = Vec<ExtractionTuple>> {
    prop::collection::vec(tuple_strategy(), 1..60)
}

/// Every unordered pair of words sharing a sentence, as contexts.
fn word_contexts(tuples: &[ExtractionTuple]) -> Vec<ContextKey> {
    build_contexts(
        tuples,
        |p| vec![p.rsplit(' ').next().unwrap().to_string()],
        true,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn admission_is_order_independent(mut tuples in corpus(), seed in any::<u64>()) {
        let cfg = IngestConfig::default();
        let admitted = |ts: &[ExtractionTuple]| {
            let mut v: Vec<ExtractionTuple> = ts.iter().filter(|t| admit_tuple(t, &cfg).is_ok()).cloned().collect();
            v.sort_by_key(|t| format!("{t:?}"));
            v
        };
        let before = admitted(&tuples);
        let n = tuples.len();
        for i in 0..n {
            tuples.swap(i, (seed as usize).wrapping_add(i * 7) % n);
        }
        prop_assert_eq!(before, admitted(&tuples));
    }

    #[test]
    fn verb_total_is_sum_of_verb_lists(tuples in corpus()) {
        let stats = CorpusStats::from_tuples(&tuples);
        let expected: usize = tuples.iter().map(|t| t.rel_verbs.len()).sum();
        prop_assert_eq!(stats.verb_grand_total as usize, expected);
        prop_assert_eq!(stats.verb_totals.values().sum::<u64>(), stats.verb_grand_total);
    }

    #[test]
    fn hyperedge_pair_count(n in 3usize..8) {
        let args: Vec<RoleArg> = (0..n)
            .map(|i| RoleArg {
                role: format!("A{i}"),
                phrase: PhraseRef::new(format!("x{i}"), format!("thing {i}"), "thing"),
                span: None,
            })
            .collect();
        let edge = HyperEdge {
            predicate: "use".into(),
            args,
            pair_relations: BTreeMap::new(),
            doc_id: "d".into(),
            post_id: "d".into(),
            sentence_id: 0,
            timestamp: None,
            token_span: (0, 10),
            sentence_tokens: None,
        };
        prop_assert_eq!(hyperedge_decompose(&edge).unwrap().len(), n * (n - 1) / 2);
    }

    #[test]
    fn cosine_is_symmetric_and_unit(a in "[a-z ]{1,30}", b in "[a-z ]{1,30}") {
        let x = hashed_embedding(&a, 64);
        let y = hashed_embedding(&b, 64);
        prop_assert!((x.norm() - 1.0).abs() <= 1e-6);
        prop_assert_eq!(cosine(&x, &y).unwrap(), cosine(&y, &x).unwrap());
        prop_assert!((cosine(&x, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ranking_is_permutation_invariant_and_monotone(tuples in corpus(), min in 0u64..4) {
        let r = rank_entities(&tuples, min);
        let mut rev = tuples.clone();
        rev.reverse();
        prop_assert_eq!(&r, &rank_entities(&rev, min));
        for w in r.windows(2) {
            prop_assert!(w[0].combined_score >= w[1].combined_score);
        }
        prop_assert!(r.iter().all(|e| e.combined_score >= min));
    }

    #[test]
    fn supernode_seeds_are_disjoint(tuples in corpus(), k_max in 1usize..6) {
        let ranking = rank_entities(&tuples, 1);
        let s = build_supernodes(&ranking, &PhraseTable::from_tuples(&tuples), k_max);
        let mut seen = BTreeSet::new();
        for sn in &s {
            prop_assert!(!sn.seeds.is_empty() && sn.seeds.len() <= k_max);
            for seed in &sn.seeds {
                prop_assert!(seen.insert(seed.clone()), "seed {} reused", seed);
            }
        }
        // every listed entity is used exactly once
        prop_assert_eq!(seen.len(), ranking.len());
    }

    #[test]
    fn subnodes_partition_surviving_phrases(tuples in corpus(), k in 1usize..5) {
        let phrases = PhraseTable::from_tuples(&tuples);
        let s = build_supernodes(&rank_entities(&tuples, 1), &phrases, 3);
        let cfg = SubnodeConfig { k_clusters: k, ..SubnodeConfig::default() };
        let subs = build_subnodes(&s, &phrases, &EmbeddingStore::deterministic(32), &post_word_frequency(&tuples), &cfg).unwrap();
        for sn in &s {
            let mut seen = BTreeSet::new();
            for sub in subs.iter().filter(|x| x.parent_supernode == sn.id) {
                prop_assert!(!sub.label.is_empty());
                for p in &sub.member_phrases {
                    prop_assert!(sn.member_phrases.contains(p));
                    prop_assert!(seen.insert(p.clone()));
                }
            }
        }
    }

    #[test]
    fn context_counts_never_exceed_corpus_counts(tuples in corpus()) {
        let stats = CorpusStats::from_tuples(&tuples);
        let index = SentenceIndex::new(&tuples);
        let cfg = ScoringConfig { min_context_count: 1, top_m: usize::MAX, ..Default::default() };
        for ctx in word_contexts(&tuples) {
            let scores = score_context(&ctx, &index, &stats, &cfg).unwrap();
            for v in &scores {
                prop_assert!(v.count_in_context <= v.count_in_corpus);
                prop_assert!(v.p_pair > 0.0 && v.p_pair <= 1.0);
                prop_assert!(v.p_corpus > 0.0 && v.p_corpus <= 1.0);
                prop_assert!((v.kl - (v.p_pair.ln() - v.p_corpus.ln())).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ranking_survives_corpus_duplication(tuples in corpus()) {
        let mut doubled = tuples.clone();
        for t in &tuples {
            let mut c = t.clone();
            c.doc_id = format!("copy-{}", c.doc_id);
            c.post_id = c.doc_id.clone();
            doubled.push(c);
        }
        let cfg = ScoringConfig { min_context_count: 1, top_m: usize::MAX, ..Default::default() };
        let rank = |ts: &[ExtractionTuple], ctx: &ContextKey| -> Vec<String> {
            let stats = CorpusStats::from_tuples(ts);
            score_context(ctx, &SentenceIndex::new(ts), &stats, &cfg).unwrap().into_iter().map(|v| v.verb).collect()
        };
        let single = word_contexts(&tuples);
        let double = word_contexts(&doubled);
        for ctx in &single {
            let twin = double.iter().find(|c| c.actant_a == ctx.actant_a && c.actant_b == ctx.actant_b).unwrap();
            prop_assert_eq!(twin.sentence_ids.len(), 2 * ctx.sentence_ids.len());
            prop_assert_eq!(rank(&tuples, ctx), rank(&doubled, twin));
        }
    }

    #[test]
    fn alpha_chain_holds(scores in prop::collection::vec(0.01f64..100.0, 1..30), n in 1usize..8, alpha in 0.05f64..0.95) {
        let mut ls: Vec<LabelScore> = scores
            .iter()
            .enumerate()
            .map(|(i, &s)| LabelScore { word: format!("w{i}"), tf: 1, idf: s, score: s })
            .collect();
        ls.sort_by(|a, b| b.score.total_cmp(&a.score));
        let label = alpha_chain(&ls, n, alpha);
        prop_assert!(!label.is_empty() && label.len() <= n);
        for i in 1..label.len() {
            prop_assert!(ls[i].score > alpha * ls[i - 1].score);
        }
        if label.len() < n && label.len() < ls.len() {
            prop_assert!(ls[label.len()].score <= alpha * ls[label.len() - 1].score);
        }
    }

    #[test]
    fn cooccurrence_matrix_laws(
        runs in prop::collection::vec(prop::collection::vec(0usize..3, 7), 1..20),
        p1 in 0.5f64..1.0,
        p2 in 0.05f64..0.45,
    ) {
        let ids: Vec<String> = (0..7).map(|i| format!("n{i}")).collect();
        let m = CooccurrenceMatrix::accumulate(ids, &runs);
        let t = runs.len() as u32;
        for i in 0..7 {
            prop_assert_eq!(m.counts[i][i], t);
            for j in 0..7 {
                prop_assert_eq!(m.counts[i][j], m.counts[j][i]);
                prop_assert!(m.counts[i][j] <= t);
            }
        }
        let cfg = ConsensusConfig { t_max: t, p_th1: p1, p_th2: p2, base_seed: 0 };
        let a = assign_from_matrix(m.clone(), &cfg);
        let mut seen = BTreeSet::new();
        for (core, ext) in a.cores.iter().zip(&a.extended) {
            prop_assert!(core.len() >= 2);
            prop_assert!(core.is_subset(ext));
            for n in core {
                prop_assert!(seen.insert(n.clone()), "cores overlap");
                let i: usize = n[1..].parse().unwrap();
                let strongest = core.iter().filter(|o| *o != n).map(|o| m.get(i, o[1..].parse().unwrap())).fold(0.0, f64::max);
                prop_assert!(strongest >= p1);
            }
        }
        // raising p_th1 never enlarges a core
        let higher = assign_from_matrix(m.clone(), &ConsensusConfig { p_th1: (p1 + 0.2).min(1.0), ..cfg.clone() });
        for c in &higher.cores {
            prop_assert!(a.cores.iter().any(|big| c.is_subset(big)));
        }
        // lowering p_th2 never shrinks an extended set
        let lower = assign_from_matrix(m, &ConsensusConfig { p_th2: p2 / 2.0, ..cfg });
        for (small, big) in a.extended.iter().zip(&lower.extended) {
            prop_assert!(small.is_subset(big));
        }
    }

    #[test]
    fn ego_and_power_are_induced(edges in prop::collection::vec((0usize..8, 0usize..8, 0usize..3), 0..25), centre in 0usize..8) {
        let net = random_net(&edges);
        let id = format!("n{centre}");
        let ego = ego_network(&net, &id).unwrap();
        prop_assert!(ego.node(&id).is_some());
        for n in &ego.nodes {
            if n.id != id {
                prop_assert!(net.edges.iter().any(|e| (e.source == id && e.target == n.id) || (e.target == id && e.source == n.id)));
            }
        }
        let roster: BTreeSet<String> = (0..8).filter(|i| i % 2 == 0).map(|i| format!("n{i}")).collect();
        let power = power_network(&net, &roster, &["own", "chair"]);
        for e in &power.edges {
            prop_assert!(net.edges.contains(e));
            prop_assert!(roster.contains(&e.source) && roster.contains(&e.target));
        }
    }

    #[test]
    fn removal_never_merges_components(edges in prop::collection::vec((0usize..8, 0usize..8, 0usize..3), 0..25), gone in 0usize..8) {
        let net = random_net(&edges);
        let before = components(&net);
        let removed = format!("n{gone}");
        let after = keystone_decomposition(&net, &removed).unwrap();
        for part in &after {
            prop_assert!(!part.contains(&removed));
            prop_assert!(before.iter().any(|whole| part.iter().all(|n| whole.contains(n))));
        }
        prop_assert!(after.len() + 1 >= before.len());
    }

    #[test]
    fn synthetic_corpus_is_byte_reproducible(seed in any::<u64>()) {
        let fw = demo_framework();
        let dump = |s| {
            let mut buf = Vec::new();
            write_corpus(&mut buf, &generate_synthetic_corpus(&fw, 40, s).unwrap()).unwrap();
            buf
        };
        prop_assert_eq!(dump(seed), dump(seed));
    }

    #[test]
    fn recall_is_monotone_in_tau(edges in prop::collection::vec((0usize..8, 0usize..8, 0usize..3), 1..25), t1 in 0.1f64..1.0, t2 in 0.1f64..1.0) {
        let net = random_net(&edges);
        let gold = GoldGraph {
            nodes: (0..8).map(|i| GoldNode { label: format!("n{i}") }).collect(),
            edges: edges
                .iter()
                .map(|&(a, b, v)| GoldEdge { src: format!("n{a}"), dst: format!("n{b}"), relationship: ["owned", "met with", "closed"][v].into() })
                .collect(),
            provenance: String::new(),
        };
        let store = EmbeddingStore::deterministic(64);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let r_lo = match_relationships(&net, &gold, &store, lo, MatchMode::Exact).unwrap();
        let r_hi = match_relationships(&net, &gold, &store, hi, MatchMode::Exact).unwrap();
        prop_assert!(r_hi.recall <= r_lo.recall);
        let mut reversed = gold.clone();
        reversed.edges.reverse();
        let r_rev = match_relationships(&net, &reversed, &store, lo, MatchMode::Exact).unwrap();
        prop_assert_eq!(r_rev.recall, r_lo.recall);
        prop_assert_eq!(r_rev.mean_cosine, r_lo.mean_cosine);
    }
}

fn random_net(edges: &[(usize, usize, usize)]) -> NarrativeNetwork {
    let verbs = ["own", "meet", "chair"];
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(a, b, v) in edges {
        pairs.entry((a, b)).or_insert(v);
    }
    NarrativeNetwork {
        nodes: (0..8)
            .map(|i| NetworkNode {
                id: format!("n{i}"),
                label: format!("n{i}"),
                group: None,
                frequency: 1,
            })
            .collect(),
        supernodes: Vec::new(),
        edges: pairs
            .iter()
            .map(|(&(a, b), &v)| NetworkEdge {
                source: format!("n{a}"),
                target: format!("n{b}"),
                weight: 2,
                verbs: vec![VerbScore {
                    verb: verbs[v].into(),
                    count_in_context: 2,
                    count_in_corpus: 4,
                    p_pair: 1.0,
                    p_corpus: 0.5,
                    kl: 2f64.ln(),
                    score: 2f64.ln(),
                }],
            })
            .collect(),
        observed_pairs: pairs.len(),
    }
}
