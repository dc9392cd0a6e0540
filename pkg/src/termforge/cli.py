"""Command-line entry points; each subcommand exposes one pipeline stage.

    termforge stats     <corpus> [...]
    termforge extract   <corpus> -o couples.tsv
    termforge featurize <couples.tsv> -o <dir> [--sigma1 N --sigma2 N]
    termforge encode    nmf|w2v ...
    termforge cluster   kmeans|ap <rep-file> ...
    termforge evaluate  <clustering.csv> <rep-file> <gold.tsv>
    termforge sweep     <rep-file> --gold <tsv> -o curves.csv
    termforge pipeline  --corpus <path> --gold <tsv> --out <dir> ...
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from .clustering import (ApConfig, KmeansConfig, MEDIAN_PREFERENCE,
                         affinity_propagation, kmeans,
                         pairwise_cosine_dissimilarity, load_clustering,
                         save_clustering)
from .corpus import corpus_stats, load_corpus
from .embeddings import SkipgramConfig, np_vectors, save_embeddings, train_skipgram
from .evaluation import evaluate_clustering, format_value, load_gold_standard
from .experiment import (PipelineConfig, Selection, SweepConfig, run_pipeline,
                         run_sweep, write_curves_csv, write_repetitions_csv)
from .extraction import SCHEMES, read_couples_tsv, write_couples_tsv, extract_corpus, Role
from .matrices import (MatrixKind, Thresholds, NP_VPC, NP_VPC_TFIDF,
                       REPRESENTATIONS, apply_frequency_threshold,
                       apply_value_threshold, build_role_matrix, load_matrix,
                       load_representation, make_representation,
                       merge_matrices, representation_from_matrix, save_matrix,
                       save_representation, tfidf_weight)
from .nmf import nmf, save_dense

log = logging.getLogger(__name__)

SELECT_NAMES = {"first-peak": Selection.FIRST_PEAK, "global": Selection.GLOBAL}


def _cmd_stats(args) -> int:
    print("corpus,n_documents,n_sentences,n_words,words_per_document")
    for path in args.corpus:
        stats = corpus_stats(load_corpus(path))
        print(",".join([str(path), str(stats.n_documents), str(stats.n_sentences),
                        str(stats.n_words), format_value(stats.words_per_document)]))
    return 0


def _cmd_extract(args) -> int:
    corpus = load_corpus(args.corpus)
    config = SCHEMES[args.scheme](root_only=args.root_only)
    couples = extract_corpus(corpus, config)
    write_couples_tsv(couples, args.out, header=args.header)
    log.info("wrote %d couples to %s", len(couples), args.out)
    return 0


def _cmd_featurize(args) -> int:
    couples = read_couples_tsv(args.couples)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    thresholds = Thresholds(args.sigma1, args.sigma2)
    subj = build_role_matrix(couples, Role.SUBJECT)
    obj = build_role_matrix(couples, Role.OBJECT)
    merged = merge_matrices(subj, obj)
    counts = apply_frequency_threshold(merged, thresholds)
    weighted = apply_value_threshold(tfidf_weight(counts), thresholds)
    save_matrix(subj, out / "subject.mtx")
    save_matrix(obj, out / "object.mtx")
    save_matrix(merged, out / "merged.mtx")
    save_matrix(counts, out / "np_vpc.mtx")
    save_matrix(weighted, out / "np_vpc_tfidf.mtx")
    save_representation(representation_from_matrix(counts, NP_VPC),
                        out / f"rep_{NP_VPC}.txt")
    save_representation(representation_from_matrix(weighted, NP_VPC_TFIDF),
                        out / f"rep_{NP_VPC_TFIDF}.txt")
    log.info("matrices under %s: np_vpc %s, tfidf %s", out, counts.shape, weighted.shape)
    return 0


def _cmd_encode_nmf(args) -> int:
    counts = load_matrix(args.matrix, MatrixKind.MERGED_COUNTS)
    pair = nmf(counts, rank=args.rank, max_iter=args.max_iter, tol=args.tol,
               seed=args.seed)
    rep = make_representation(counts.row_labels, pair.W, "NP_VPC_NMF")
    save_representation(rep, args.out)
    if args.h_out:
        save_dense(pair.H, args.h_out)
    log.info("NMF: %d iterations, final error %s", pair.iterations_run,
             format_value(pair.final_error))
    return 0


def _cmd_encode_w2v(args) -> int:
    corpus = load_corpus(args.corpus)
    config = SkipgramConfig(dim=args.dim, window=args.window,
                            negatives=args.negatives, epochs=args.epochs,
                            min_count=args.min_count,
                            learning_rate=args.learning_rate, seed=args.seed)
    table = train_skipgram(corpus, config)
    save_embeddings(table, args.out)
    if args.compose:
        keys = [line for line in Path(args.compose).read_text(encoding="utf-8").splitlines()
                if line.strip()]
        rep = np_vectors(table, keys)
        save_representation(rep, args.rep_out or "rep_NP_w2v.txt")
    log.info("trained %d vectors of dim %d", len(table.vocab), table.dim)
    return 0


def _cmd_cluster(args) -> int:
    rep = load_representation(args.rep)
    if args.algorithm == "kmeans":
        clustering = kmeans(rep, KmeansConfig(k=args.k, seed=args.seed,
                                              max_iter=args.max_iter,
                                              rel_tol=args.rel_tol))
        config_echo = {"k": args.k, "seed": args.seed, "max_iter": args.max_iter,
                       "rel_tol": args.rel_tol}
    else:
        preference = (MEDIAN_PREFERENCE if args.preference == MEDIAN_PREFERENCE
                      else float(args.preference))
        config = ApConfig(preference=preference, damping=args.damping,
                          max_iter=args.max_iter,
                          convergence_window=args.convergence_window)
        clustering = affinity_propagation(rep, config)
        config_echo = dataclasses.asdict(config)
        if not clustering.converged:
            print("warning: affinity propagation hit max_iter before the "
                  "exemplar set stabilized", file=sys.stderr)
    save_clustering(clustering, args.out, config=config_echo)
    log.info("%s: %d clusters over %d NPs", clustering.algorithm,
             clustering.n_clusters, len(clustering.labels))
    return 0


def _cmd_evaluate(args) -> int:
    clustering = load_clustering(args.clustering)
    rep = load_representation(args.rep)
    if tuple(clustering.labels) != tuple(rep.row_labels):
        raise ValueError("clustering and representation label sets differ; "
                         "evaluate needs the representation the clustering was built from")
    gold = load_gold_standard(args.gold)
    dissimilarity = pairwise_cosine_dissimilarity(rep.matrix)
    report = evaluate_clustering(dissimilarity, clustering, gold)
    name = args.representation or rep.provenance
    print("representation,algorithm,n_clusters,ratio,purity,ari,dunn2,silhouette,coverage")
    print(",".join([
        name, clustering.algorithm, str(report.n_clusters),
        format_value(report.n_clusters / gold.n_labels),
        format_value(report.purity), format_value(report.adjusted_rand),
        format_value(report.dunn2), format_value(report.silhouette),
        format_value(report.coverage)]))
    return 0


def _cmd_sweep(args) -> int:
    rep = load_representation(args.rep, provenance=args.representation)
    gold = load_gold_standard(args.gold) if args.gold else None
    config = SweepConfig(k_min=args.k_min, k_max=args.k_max,
                         repetitions=args.reps, master_seed=args.seed)
    result = run_sweep(rep, gold, config)
    write_curves_csv(result, Path(args.out))
    if args.repetitions_out:
        write_repetitions_csv(result, Path(args.repetitions_out))
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0


def _cmd_pipeline(args) -> int:
    corpus = load_corpus(args.corpus)
    gold = None
    if args.gold:
        try:
            gold = load_gold_standard(args.gold)
        except FileNotFoundError:
            print(f"error: [evaluation] gold standard not found: {args.gold}; "
                  "external indices will be NA", file=sys.stderr)
    sweep = SweepConfig(k_min=args.k_min, k_max=args.k_max,
                        repetitions=args.reps, master_seed=args.seed,
                        selection=SELECT_NAMES[args.select],
                        peak_floor=args.peak_floor,
                        sigma1=args.sigma1, sigma2=args.sigma2,
                        representations=tuple(args.representations))
    config = PipelineConfig(sweep=sweep, scheme=args.scheme,
                            root_only=args.root_only,
                            nmf_rank=args.nmf_rank,
                            w2v_dim=args.w2v_dim, w2v_window=args.w2v_window,
                            w2v_epochs=args.w2v_epochs,
                            w2v_min_count=args.w2v_min_count)
    report = run_pipeline(corpus, gold, config, args.out)
    log.info("report with %d rows written to %s", len(report.rows),
             Path(args.out) / "report.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termforge",
        description="Cluster domain terms by syntactic co-occurrence context.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress details")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus size statistics as CSV")
    p.add_argument("corpus", nargs="+", help="CoNLL-U file or directory")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("extract", help="extract (VPC, role, NP) couples")
    p.add_argument("corpus")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="spacy")
    p.add_argument("--root-only", action="store_true",
                   help="only extract from root verbs")
    p.add_argument("--header", action="store_true", help="write a header line")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("featurize", help="build and threshold co-occurrence matrices")
    p.add_argument("couples")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.add_argument("--sigma1", type=float, default=0.0,
                   help="frequency-sum cutoff (strict >)")
    p.add_argument("--sigma2", type=float, default=0.0,
                   help="tf-idf-sum cutoff (strict >)")
    p.set_defaults(func=_cmd_featurize)

    enc = sub.add_parser("encode", help="dense encodings (NMF or word vectors)")
    enc_sub = enc.add_subparsers(dest="encoder", required=True)

    p = enc_sub.add_parser("nmf", help="factorize a counts matrix")
    p.add_argument("matrix", help="MatrixMarket file with .rows/.cols sidecars")
    p.add_argument("-o", "--out", required=True, help="labeled W output")
    p.add_argument("--h-out", help="optional H output")
    p.add_argument("--rank", type=int, default=100)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_encode_nmf)

    p = enc_sub.add_parser("w2v", help="train skip-gram vectors")
    p.add_argument("corpus")
    p.add_argument("-o", "--out", required=True, help="embedding table output")
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--learning-rate", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--compose", help="file of NP keys to compose vectors for")
    p.add_argument("--rep-out", help="composed representation output path")
    p.set_defaults(func=_cmd_encode_w2v)

    clu = sub.add_parser("cluster", help="cluster a representation file")
    clu_sub = clu.add_subparsers(dest="algorithm", required=True)

    p = clu_sub.add_parser("kmeans", help="spherical K-Means")
    p.add_argument("rep")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.set_defaults(func=_cmd_cluster)

    p = clu_sub.add_parser("ap", help="affinity propagation")
    p.add_argument("rep")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--preference", default=MEDIAN_PREFERENCE,
                   help="real value or 'median'")
    p.add_argument("--damping", type=float, default=0.9)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--convergence-window", type=int, default=50)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("evaluate", help="validity indices for one clustering")
    p.add_argument("clustering")
    p.add_argument("rep")
    p.add_argument("gold")
    p.add_argument("--representation", help="name for the output row")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="K-Means k sweep over one representation")
    p.add_argument("rep")
    p.add_argument("-o", "--out", required=True, help="curves CSV output")
    p.add_argument("--gold")
    p.add_argument("--representation", help="representation name for seeds")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions-out", help="raw per-repetition CSV")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("pipeline", help="full corpus-to-report workflow")
    p.add_argument("--corpus", required=True)
    p.add_argument("--gold")
    p.add_argument("--out", required=True)
    p.add_argument("--sigma1", type=float, default=0.0)
    p.add_argument("--sigma2", type=float, default=0.0)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--select", choices=sorted(SELECT_NAMES), default="first-peak")
    p.add_argument("--peak-floor", type=float, default=0.9)
    p.add_argument("--root-only", action="store_true")
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="spacy")
    p.add_argument("--representations", nargs="+", choices=REPRESENTATIONS,
                   default=list(REPRESENTATIONS))
    p.add_argument("--nmf-rank", type=int, default=100)
    p.add_argument("--w2v-dim", type=int, default=100)
    p.add_argument("--w2v-window", type=int, default=5)
    p.add_argument("--w2v-epochs", type=int, default=5)
    p.add_argument("--w2v-min-count", type=int, default=2)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
