// Command-line front end: gram caching, the two prediction pipelines,
// clustering, registry extraction, and an offline selftest.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "aakern/affinity_pipeline.hpp"
#include "aakern/cluster.hpp"
#include "aakern/errors.hpp"
#include "aakern/parallel.hpp"
#include "aakern/tree_export.hpp"

namespace fs = std::filesystem;
using namespace aakern;

namespace {

constexpr const char* kVersion = "1.0.0";

// Removes incomplete outputs when a command dies mid-write.
class OutputGuard {
public:
    ~OutputGuard() {
        if (committed_)
            return;
        for (const auto& path : paths_) {
            std::error_code ec;
            fs::remove(path, ec);
        }
    }
    void track(const fs::path& path) { paths_.push_back(path); }
    void commit() { committed_ = true; }

private:
    std::vector<fs::path> paths_;
    bool committed_ = false;
};

void write_text(OutputGuard& guard, const fs::path& path, const std::string& text) {
    guard.track(path);
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << text;
    if (!out)
        throw DataError("failed writing " + path.string());
}

std::string hash_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buffer[i]);
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream s;
    s << std::hex << h;
    return s.str();
}

// Every run leaves a manifest sufficient to reproduce it.
void write_manifest(OutputGuard& guard, const fs::path& out_dir, const std::string& command,
                    const nlohmann::json& parameters,
                    const std::vector<fs::path>& inputs,
                    const std::vector<std::string>& outputs) {
    nlohmann::json doc;
    doc["tool"] = "aakern";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["parameters"] = parameters;
    nlohmann::json in = nlohmann::json::array();
    for (const auto& path : inputs)
        in.push_back({{"path", path.string()}, {"fnv1a64", hash_file(path)}});
    doc["inputs"] = in;
    doc["outputs"] = outputs;
    write_text(guard, out_dir / "manifest.json", doc.dump(2) + "\n");
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw DataError(std::string("bad ") + what + " value '" + item + "'");
        }
    }
    if (out.empty())
        throw DataError(std::string("empty ") + what + " list");
    return out;
}

struct SequenceSet {
    std::vector<std::string> ids;
    std::vector<AminoChain> chains;
};

SequenceSet load_seq_tsv(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    SequenceSet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(path.string() + " line " + std::to_string(lineno) +
                            ": expected id<TAB>sequence");
        set.ids.push_back(line.substr(0, tab));
        try {
            set.chains.push_back(AminoChain::parse(line.substr(tab + 1)));
        } catch (const DataError& e) {
            throw DataError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (set.ids.empty())
        throw DataError("no sequences in " + path.string());
    return set;
}

SequenceSet registry_sequences(const AlleleRegistry& registry) {
    SequenceSet set;
    for (const auto& e : registry.entries) {
        set.ids.push_back(e.allele_name);
        set.chains.push_back(e.form.chain);
    }
    return set;
}

AlleleRegistry load_registry_from_fasta(const fs::path& path, const RegistryOptions& options) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    const FastaParseResult parsed = parse_fasta(in);
    AlleleRegistry registry = build_registry(parsed.records, options);
    for (const auto& reject : parsed.rejected)
        registry.exclusions.push_back({reject.allele_name, reject.reason});
    return registry;
}

BindingDataset load_dataset(const fs::path& path, const NormalizationSpec& norm,
                            IngestReport* report_out = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    auto [dataset, report] = ingest_binding_tsv(in, norm);
    for (const auto& w : report.warnings)
        std::cerr << "note: " << w << "\n";
    if (report_out)
        *report_out = report;
    return std::move(dataset);
}

std::string choices_tsv(const std::vector<FoldChoice>& choices) {
    std::string out = "allele\tfold\tbeta\tlambda\tloo_rmse\n";
    char buf[128];
    for (const auto& c : choices) {
        std::snprintf(buf, sizeof(buf), "%s\t%d\t%.10g\t%.10g\t%.10g\n",
                      c.allele.empty() ? "-" : c.allele.c_str(), c.fold, c.beta, c.lambda,
                      c.loo_rmse);
        out += buf;
    }
    return out;
}

fs::path cache_directory(const std::string& flag_value) {
    if (!flag_value.empty())
        return flag_value;
    if (const char* env = std::getenv("AAKERN_CACHE_DIR"))
        return env;
    return fs::current_path();
}

// ---------------------------------------------------------------- commands

int cmd_gram(const std::string& fasta, const std::string& seqs, double beta,
             std::size_t kmax, bool averaged, unsigned threads, std::string out,
             const std::string& cache_dir_flag, const std::string& export_tsv) {
    SequenceSet set;
    std::vector<fs::path> inputs;
    if (!fasta.empty()) {
        set = registry_sequences(load_registry_from_fasta(fasta, {}));
        inputs.push_back(fasta);
    } else if (!seqs.empty()) {
        set = load_seq_tsv(seqs);
        inputs.push_back(seqs);
    } else {
        throw DataError("gram needs --fasta or --seqs");
    }

    KernelParams params{beta, kmax == 0 ? std::optional<std::size_t>{} : kmax, averaged};
    std::vector<std::string> sequences;
    for (const auto& c : set.chains)
        sequences.push_back(c.to_string());
    const std::string fingerprint = gram_fingerprint(sequences, params);

    if (out.empty())
        out = (cache_directory(cache_dir_flag) / (fingerprint + ".gram")).string();

    if (fs::exists(out)) {
        try {
            const GramMatrix cached = GramMatrix::load_file(out);
            if (cached.fingerprint() == fingerprint) {
                std::cout << "cache hit: " << out << " (fingerprint " << fingerprint << ")\n";
                return 0;
            }
            std::cerr << "note: " << out << " holds fingerprint " << cached.fingerprint()
                      << "; rebuilding\n";
        } catch (const DataError&) {
            std::cerr << "note: " << out << " is not a readable gram cache; rebuilding\n";
        }
    }

    std::vector<std::string> warnings;
    const StringKernel kernel(load_blosum62_2(), params);
    const GramMatrix gram = build_gram(set.ids, set.chains, kernel, threads, &warnings);
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << "\n";

    OutputGuard guard;
    guard.track(out);
    gram.save_file(out);
    if (!export_tsv.empty()) {
        std::string tsv = "id";
        for (const auto& id : gram.ids())
            tsv += "\t" + id;
        tsv += "\n";
        char buf[40];
        for (std::size_t i = 0; i < gram.size(); ++i) {
            tsv += gram.ids()[i];
            for (std::size_t j = 0; j < gram.size(); ++j) {
                std::snprintf(buf, sizeof(buf), "\t%.12g", gram.at(i, j));
                tsv += buf;
            }
            tsv += "\n";
        }
        write_text(guard, export_tsv, tsv);
    }
    guard.commit();
    std::cout << "built gram over " << gram.size() << " chains -> " << out << " (fingerprint "
              << fingerprint << ")\n";
    return 0;
}

int cmd_registry(const std::string& fasta, const std::string& out_dir,
                 std::vector<std::string> exclude_families, bool keep_nonexpressed,
                 bool exclusive_markers) {
    RegistryOptions options;
    options.drop_nonexpressed = !keep_nonexpressed;
    options.exclude_families = std::move(exclude_families);
    options.convention =
        exclusive_markers ? MarkerConvention::Exclusive : MarkerConvention::Inclusive;
    const AlleleRegistry registry = load_registry_from_fasta(fasta, options);

    fs::create_directories(out_dir);
    OutputGuard guard;
    write_text(guard, fs::path(out_dir) / "registry.tsv", registry.to_tsv());
    write_text(guard, fs::path(out_dir) / "exclusions.tsv", registry.exclusions_to_tsv());
    write_manifest(guard, out_dir, "registry",
                   {{"exclude_families", options.exclude_families},
                    {"drop_nonexpressed", options.drop_nonexpressed},
                    {"marker_convention", exclusive_markers ? "exclusive" : "inclusive"}},
                   {fasta}, {"registry.tsv", "exclusions.tsv"});
    guard.commit();
    std::cout << "registry: " << registry.entries.size() << " entries, "
              << registry.exclusions.size() << " exclusions\n";
    return 0;
}

int cmd_predict_fixed(const std::string& data_path, bool raw_ic50, double base,
                      const std::string& betas, const std::string& lambdas, std::size_t kmax,
                      unsigned threads, int assign_fold_count, std::uint64_t seed,
                      double modulus_beta, const std::string& out_dir) {
    FixedAlleleOptions options;
    options.norm = NormalizationSpec::for_base(base, raw_ic50);
    if (!betas.empty())
        options.grid.betas = parse_number_list(betas, "beta");
    if (!lambdas.empty())
        options.grid.lambdas = parse_number_list(lambdas, "lambda");
    options.k_max = kmax == 0 ? std::optional<std::size_t>{} : kmax;
    options.threads = threads;

    BindingDataset dataset = load_dataset(data_path, options.norm);
    if (!dataset.has_folds()) {
        if (assign_fold_count <= 0)
            throw DataError("dataset lacks fold labels; pass --assign-folds N");
        assign_folds(dataset, assign_fold_count, seed);
    }

    const FixedAlleleResult result = run_fixed_allele(dataset, options);

    fs::create_directories(out_dir);
    OutputGuard guard;
    write_text(guard, fs::path(out_dir) / "metrics.tsv", result.report.to_tsv());
    write_text(guard, fs::path(out_dir) / "predictions.tsv",
               predictions_to_tsv(result.predictions));
    write_text(guard, fs::path(out_dir) / "choices.tsv", choices_tsv(result.choices));
    std::vector<std::string> outputs = {"metrics.tsv", "predictions.tsv", "choices.tsv"};

    if (modulus_beta > 0.0) {
        // Per-allele modulus of continuity of the predictions.
        const StringKernel kernel(load_blosum62_2(),
                                  KernelParams{modulus_beta, options.k_max, false});
        std::map<std::string, std::pair<std::vector<double>, std::vector<AminoChain>>> groups;
        for (const auto& p : result.predictions) {
            groups[p.allele].first.push_back(p.predicted);
            groups[p.allele].second.push_back(AminoChain::parse(p.peptide));
        }
        std::string tsv = "allele\tmodulus\n";
        char buf[64];
        for (const auto& [allele, group] : groups) {
            std::snprintf(buf, sizeof(buf), "\t%.5f\n",
                          modulus_of_continuity(group.first, group.second, kernel));
            tsv += allele;
            tsv += buf;
        }
        write_text(guard, fs::path(out_dir) / "modulus.tsv", tsv);
        outputs.push_back("modulus.tsv");
    }

    // Peptide-count-weighted mean of the per-allele fold-averaged winners.
    std::vector<std::pair<std::vector<double>, std::size_t>> per_allele;
    for (const auto& row : result.report.rows) {
        std::vector<double> fold_betas;
        for (const auto& c : result.choices)
            if (c.allele == row.allele)
                fold_betas.push_back(c.beta);
        per_allele.emplace_back(std::move(fold_betas), row.n_peptides);
    }
    const double beta_star = aggregate_beta(per_allele);

    write_manifest(guard, out_dir, "predict-fixed",
                   {{"base", base},
                    {"raw_ic50", raw_ic50},
                    {"betas", options.grid.betas},
                    {"lambdas", options.grid.lambdas},
                    {"k_max", kmax},
                    {"modulus_beta", modulus_beta},
                    {"aggregated_beta", beta_star},
                    {"seed", seed}},
                   {data_path}, outputs);
    guard.commit();
    std::cout << result.report.to_tsv();
    std::cout << "aggregated beta (peptide-count weighted): " << beta_star << "\n";
    return 0;
}

int cmd_predict_pan(const std::string& data_path, const std::string& fasta, bool raw_ic50,
                    double base, double beta_peptide, const std::string& betas,
                    const std::string& lambdas, std::size_t kmax, unsigned threads,
                    int assign_fold_count, std::uint64_t seed, const std::string& out_dir) {
    PanOptions options;
    options.norm = NormalizationSpec::for_base(base, raw_ic50);
    options.beta_peptide = beta_peptide;
    if (!betas.empty())
        options.grid.betas = parse_number_list(betas, "beta");
    if (!lambdas.empty())
        options.grid.lambdas = parse_number_list(lambdas, "lambda");
    options.k_max = kmax == 0 ? std::optional<std::size_t>{} : kmax;
    options.threads = threads;

    BindingDataset dataset = load_dataset(data_path, options.norm);
    if (!dataset.has_folds()) {
        if (assign_fold_count <= 0)
            throw DataError("dataset lacks fold labels; pass --assign-folds N");
        assign_folds(dataset, assign_fold_count, seed);
    }
    const AlleleRegistry registry = load_registry_from_fasta(fasta, {});

    const PanResult result = run_pan_allele(dataset, registry, options);

    fs::create_directories(out_dir);
    OutputGuard guard;
    write_text(guard, fs::path(out_dir) / "metrics.tsv", result.report.to_tsv());
    write_text(guard, fs::path(out_dir) / "predictions.tsv",
               predictions_to_tsv(result.predictions));
    write_text(guard, fs::path(out_dir) / "choices.tsv", choices_tsv(result.choices));
    write_manifest(guard, out_dir, "predict-pan",
                   {{"base", base},
                    {"raw_ic50", raw_ic50},
                    {"beta_peptide", beta_peptide},
                    {"betas", options.grid.betas},
                    {"lambdas", options.grid.lambdas},
                    {"k_max", kmax},
                    {"seed", seed}},
                   {data_path, fasta}, {"metrics.tsv", "predictions.tsv", "choices.tsv"});
    guard.commit();
    std::cout << result.report.to_tsv();
    return 0;
}

int cmd_cluster(const std::string& fasta, const std::string& distances_path, double beta,
                double gamma, std::size_t cut_k, std::vector<std::string> exclude_families,
                unsigned threads, const std::string& out_dir, bool export_distances) {
    DistanceMatrix D;
    std::vector<fs::path> inputs;
    std::string gram_fp;
    if (!distances_path.empty()) {
        std::ifstream in(distances_path);
        if (!in)
            throw DataError("cannot open " + distances_path);
        D = DistanceMatrix::from_tsv(in);
        inputs.push_back(distances_path);
    } else if (!fasta.empty()) {
        // The reference set keeps every expressed allele; family exclusions
        // only shrink the clustered subset.
        const AlleleRegistry registry = load_registry_from_fasta(fasta, {});
        const SequenceSet all = registry_sequences(registry);
        if (all.ids.size() < 2)
            throw DataError("clustering needs at least two registry entries");

        const StringKernel kernel(load_blosum62_2(), KernelParams{beta, std::nullopt, false});
        const GramMatrix gram = build_gram(all.ids, all.chains, kernel, threads);
        gram_fp = gram.fingerprint();

        std::vector<std::string> subset;
        for (const auto& id : all.ids) {
            const std::string family = family_of(id);
            if (std::find(exclude_families.begin(), exclude_families.end(), family) ==
                exclude_families.end())
                subset.push_back(id);
        }
        if (subset.size() < 2)
            throw DataError("family exclusions leave fewer than two alleles");
        D = l2_distance_matrix(gram, subset);
        inputs.push_back(fasta);
    } else {
        throw DataError("cluster needs --fasta or --distances");
    }

    const ClusterTree tree = agglomerate(D, OwaParams{gamma});
    const std::size_t k = std::min(cut_k, D.size());

    fs::create_directories(out_dir);
    OutputGuard guard;
    write_text(guard, fs::path(out_dir) / "tree.nwk", tree_to_newick(tree));
    write_text(guard, fs::path(out_dir) / "tree.json", tree_to_json(tree));
    write_text(guard, fs::path(out_dir) / "cut_summary.tsv", cut_summary_tsv(tree, D, k));
    std::vector<std::string> outputs = {"tree.nwk", "tree.json", "cut_summary.tsv"};
    if (export_distances) {
        write_text(guard, fs::path(out_dir) / "distances.tsv", D.to_tsv());
        outputs.push_back("distances.tsv");
    }
    write_manifest(guard, out_dir, "cluster",
                   {{"beta", beta},
                    {"gamma", gamma},
                    {"cut", k},
                    {"exclude_families", exclude_families},
                    {"gram_fingerprint", gram_fp}},
                   inputs, outputs);
    guard.commit();
    std::cout << "clustered " << D.size() << " alleles; cut at " << k << " -> " << out_dir
              << "\n";
    return 0;
}

// Offline property suite; every check prints one line.
int cmd_selftest(std::uint64_t seed) {
    int failures = 0;
    const auto check = [&](const char* name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "ok   " : "FAIL ") << name;
        if (!ok && !detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok)
            ++failures;
    };
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, Alphabet::kSize - 1);
    const auto random_chain = [&](std::size_t len) {
        std::string s;
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(Alphabet::symbols[pick(rng)]);
        return AminoChain::parse(s);
    };

    const SubstitutionKernel& B = load_blosum62_2();
    {
        bool symmetric = true;
        for (std::size_t i = 0; i < kAlphabetSize; ++i)
            for (std::size_t j = 0; j < i; ++j)
                symmetric = symmetric && B.at(i, j) == B.at(j, i);
        check("substitution table symmetric", symmetric);

        const MarginalDistribution p = marginal(B);
        double max_dev = 0.0;
        for (std::size_t i = 0; i < kAlphabetSize; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < kAlphabetSize; ++j)
                row += B.at(i, j) * p.p[j];
            max_dev = std::max(max_dev, std::abs(row - 1.0));
        }
        check("marginal solves B p = 1", max_dev < 1e-8);
        // 4-decimal table data carries a ~1.3e-6 rounding residue.
        check("joint mass sums to one up to table rounding",
              std::abs(recover_joint(B, p).sum() - 1.0) < 2e-6);
    }
    {
        const PdReport report = pd_report(B);
        check("hadamard log conditionally positive definite",
              report.conditionally_pd && report.log_projected_min_eigenvalue > 0.0);
        bool powers_pd = true;
        for (double beta : {0.01, 0.06, 0.11387, 1.0, 5.0})
            powers_pd = powers_pd && pd_report(hadamard_power(B, beta)).min_eigenvalue > 0.0;
        check("hadamard powers positive definite", powers_pd);
    }
    {
        bool agree = true;
        for (double beta : {0.05, 0.11387, 1.0}) {
            const StringKernel k(B, KernelParams{beta, std::nullopt, false});
            for (int rep = 0; rep < 25 && agree; ++rep) {
                const AminoChain f = random_chain(1 + rep % 12);
                const AminoChain g = random_chain(1 + (rep * 5) % 12);
                agree = std::abs(k.k3(f, g) - k.k3_bruteforce(f, g)) <= 1e-10 * k.k3_bruteforce(f, g);
            }
        }
        check("recurrence matches direct enumeration", agree);
    }
    check("psi_50000(500)", std::abs(normalize_ic50(500, 50000) - 0.4256) < 5e-5);
    check("psi_15000(500)", std::abs(normalize_ic50(500, 15000) - 0.3537) < 5e-5);
    {
        const StringKernel k(B, KernelParams{1.0, std::nullopt, false});
        std::vector<std::string> ids;
        std::vector<AminoChain> chains;
        std::set<std::string> seen;
        while (chains.size() < 20) {
            const AminoChain c = random_chain(10);
            if (seen.insert(c.to_string()).second) {
                ids.push_back("c" + std::to_string(chains.size()));
                chains.push_back(c);
            }
        }
        const GramMatrix g = build_gram(ids, chains, k);
        TrainingSet train;
        std::uniform_real_distribution<double> label(0.0, 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            train.sample_ids.push_back(i);
            train.labels.push_back(label(rng));
        }
        const double lambda = 1e-3;
        const LooResult loo = loo_residuals(g, train, lambda);
        bool match = loo.skipped.empty();
        const double ridge = static_cast<double>(train.size()) * lambda;
        for (std::size_t i = 0; i < train.size() && match; ++i) {
            std::vector<std::size_t> keep;
            std::vector<double> y;
            for (std::size_t j = 0; j < train.size(); ++j)
                if (j != i) {
                    keep.push_back(j);
                    y.push_back(train.labels[j]);
                }
            const std::vector<double> c = fit_ridge(g, keep, y, ridge);
            double pred = 0.0;
            for (std::size_t j = 0; j < keep.size(); ++j)
                pred += c[j] * g.at(i, keep[j]);
            match = std::abs(loo.residuals[i] - (train.labels[i] - pred)) <= 1e-8;
        }
        check("leave-one-out shortcut equals retraining", match);
    }
    {
        bool agree = true;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> quant(0, 10);
        for (int rep = 0; rep < 10 && agree; ++rep) {
            std::vector<double> pred(50), obs(50);
            for (std::size_t i = 0; i < 50; ++i) {
                pred[i] = quant(rng) / 10.0;
                obs[i] = u(rng);
            }
            obs[0] = 0.9;
            obs[1] = 0.1;
            std::uint64_t fav = 0, total = 0;
            for (std::size_t i = 0; i < 50; ++i) {
                if (obs[i] <= 0.4256)
                    continue;
                for (std::size_t j = 0; j < 50; ++j) {
                    if (obs[j] > 0.4256)
                        continue;
                    ++total;
                    fav += pred[i] > pred[j] ? 1 : 0;
                }
            }
            agree = auc(pred, obs, 0.4256) ==
                    static_cast<double>(fav) / static_cast<double>(total);
        }
        check("auc equals pair counting", agree);
    }
    {
        bool weights_ok = true;
        for (std::size_t n : {2u, 10u, 500u, 10000u}) {
            const auto w = owa_weights(n, 0.1);
            double sum = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                sum += w[i];
                if (i > 0)
                    weights_ok = weights_ok && w[i] > w[i - 1];
            }
            weights_ok = weights_ok && std::abs(sum - 1.0) < 1e-12;
        }
        check("owa weights normalized and monotone", weights_ok);

        Eigen::MatrixXd d(2, 2);
        d << 0.0, 0.37, 0.37, 0.0;
        const DistanceMatrix D({"x", "y"}, d);
        check("singleton linkage equals raw distance",
              owa_linkage({0}, {1}, D, OwaParams{0.1}) == 0.37);
    }
    {
        const StringKernel k(B, KernelParams{0.06, std::nullopt, false});
        std::vector<std::string> ids;
        std::vector<AminoChain> chains;
        std::vector<int> family;
        std::uniform_int_distribution<std::size_t> pos(0, 39);
        for (int fam = 0; fam < 3; ++fam) {
            std::string seedseq;
            for (int i = 0; i < 40; ++i)
                seedseq.push_back(Alphabet::symbols[pick(rng)]);
            for (int m = 0; m < 8; ++m) {
                std::string s = seedseq;
                for (int mut = 0; mut < 1 + m % 3 && m > 0; ++mut)
                    s[pos(rng)] = Alphabet::symbols[pick(rng)];
                ids.push_back("f" + std::to_string(fam) + "m" + std::to_string(m));
                chains.push_back(AminoChain::parse(s));
                family.push_back(fam);
            }
        }
        const GramMatrix g = build_gram(ids, chains, k);
        const DistanceMatrix D = l2_distance_matrix(g, ids);
        const auto clusters = cut(agglomerate(D), 3);
        bool exact = clusters.size() == 3;
        for (const auto& cluster : clusters) {
            std::set<int> fams;
            for (std::size_t leaf : cluster)
                fams.insert(family[leaf]);
            exact = exact && fams.size() == 1;
        }
        check("planted families recovered by a 3-cut", exact);
    }
    {
        const StringKernel k(B, KernelParams{0.11387, std::nullopt, false});
        std::vector<std::string> ids;
        std::vector<AminoChain> chains;
        for (int i = 0; i < 6; ++i) {
            ids.push_back("s" + std::to_string(i));
            chains.push_back(random_chain(11));
        }
        const GramMatrix g = build_gram(ids, chains, k);
        std::stringstream buffer;
        g.save(buffer);
        const GramMatrix back = GramMatrix::load(buffer);
        bool same = back.fingerprint() == g.fingerprint() && back.ids() == g.ids();
        for (std::size_t i = 0; i < g.size() && same; ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                same = same && back.at(i, j) == g.at(i, j);
        check("gram cache round trip", same);
    }

    if (failures == 0) {
        std::cout << "selftest: all checks passed\n";
        return 0;
    }
    std::cout << "selftest: " << failures << " check(s) failed\n";
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"String-kernel toolkit for amino-acid chains: gram matrices, "
                 "binding-affinity regression, and allele clustering"};
    app.set_config("--config", "", "Key=value config file; flags override file values");
    app.require_subcommand(1);

    unsigned threads = default_thread_count();
    std::uint64_t seed = 20120523;
    app.add_option("--threads", threads, "Worker threads for gram builds and grid search")
        ->capture_default_str();
    app.add_option("--seed", seed, "Seed for all randomized steps")->capture_default_str();

    // gram
    std::string g_fasta, g_seqs, g_out, g_cache_dir, g_export;
    double g_beta = 0.06;
    std::size_t g_kmax = 0;
    bool g_avg = false;
    auto* gram_cmd = app.add_subcommand("gram", "Build or reuse a cached gram matrix");
    gram_cmd->add_option("--fasta", g_fasta, "FASTA of alleles (normal forms are used)");
    gram_cmd->add_option("--seqs", g_seqs, "TSV of id<TAB>sequence");
    gram_cmd->add_option("--beta", g_beta, "Hadamard exponent")->capture_default_str();
    gram_cmd->add_option("--kmax", g_kmax, "Substring length cap (0 = unlimited)");
    gram_cmd->add_flag("--averaged", g_avg, "Average over substring pairs instead of summing");
    gram_cmd->add_option("--out", g_out, "Cache path (default: <cache dir>/<fingerprint>.gram)");
    gram_cmd->add_option("--cache-dir", g_cache_dir,
                         "Cache directory (default: $AAKERN_CACHE_DIR or .)");
    gram_cmd->add_option("--export-tsv", g_export, "Also write the values as TSV");

    // registry
    std::string r_fasta, r_out = "registry_out";
    std::vector<std::string> r_exclude;
    bool r_keep_nonexpressed = false, r_exclusive = false;
    auto* registry_cmd = app.add_subcommand("registry", "Extract allele normal forms from FASTA");
    registry_cmd->add_option("--fasta", r_fasta, "FASTA input")->required();
    registry_cmd->add_option("--out-dir", r_out, "Output directory")->capture_default_str();
    registry_cmd->add_option("--exclude-family", r_exclude, "Family to exclude (repeatable)");
    registry_cmd->add_flag("--keep-nonexpressed", r_keep_nonexpressed,
                           "Keep null alleles (name suffix N)");
    registry_cmd->add_flag("--exclusive-markers", r_exclusive,
                           "Strip the RFL/TVQ markers from normal forms");

    // predict-fixed
    std::string pf_data, pf_betas, pf_lambdas, pf_out = "fixed_out";
    bool pf_raw = false;
    double pf_base = 50000.0, pf_modulus = 0.0;
    std::size_t pf_kmax = 0;
    int pf_assign = 0;
    auto* fixed_cmd =
        app.add_subcommand("predict-fixed", "Per-allele cross-validated affinity prediction");
    fixed_cmd->add_option("--data", pf_data, "Binding TSV (allele, peptide, value[, fold])")
        ->required();
    fixed_cmd->add_flag("--raw-ic50", pf_raw, "Values are raw IC50 nano-molar");
    fixed_cmd->add_option("--base", pf_base, "Normalization base")->capture_default_str();
    fixed_cmd->add_option("--betas", pf_betas, "Comma list overriding the default beta grid");
    fixed_cmd->add_option("--lambdas", pf_lambdas, "Comma list overriding the default lambdas");
    fixed_cmd->add_option("--kmax", pf_kmax, "Substring length cap (0 = unlimited)");
    fixed_cmd->add_option("--assign-folds", pf_assign,
                          "Assign N folds when the data has no fold column");
    fixed_cmd->add_option("--modulus-beta", pf_modulus,
                          "Also report the per-allele modulus of continuity at this exponent "
                          "(0 = off; 0.11387 reproduces the published setting)");
    fixed_cmd->add_option("--out-dir", pf_out, "Output directory")->capture_default_str();

    // predict-pan
    std::string pp_data, pp_fasta, pp_betas, pp_lambdas, pp_out = "pan_out";
    bool pp_raw = false;
    double pp_base = 15000.0, pp_beta_peptide = 0.11387;
    std::size_t pp_kmax = 0;
    int pp_assign = 0;
    auto* pan_cmd = app.add_subcommand(
        "predict-pan", "Product-kernel prediction across alleles and peptides");
    pan_cmd->add_option("--data", pp_data, "Binding TSV")->required();
    pan_cmd->add_option("--fasta", pp_fasta, "Allele FASTA (normal forms)")->required();
    pan_cmd->add_flag("--raw-ic50", pp_raw, "Values are raw IC50 nano-molar");
    pan_cmd->add_option("--base", pp_base, "Normalization base")->capture_default_str();
    pan_cmd->add_option("--beta-peptide", pp_beta_peptide, "Peptide-kernel exponent")
        ->capture_default_str();
    pan_cmd->add_option("--betas", pp_betas, "Comma list of allele-kernel exponents");
    pan_cmd->add_option("--lambdas", pp_lambdas, "Comma list of regularization values");
    pan_cmd->add_option("--kmax", pp_kmax, "Substring length cap (0 = unlimited)");
    pan_cmd->add_option("--assign-folds", pp_assign,
                        "Assign N folds when the data has no fold column");
    pan_cmd->add_option("--out-dir", pp_out, "Output directory")->capture_default_str();

    // cluster
    std::string c_fasta, c_distances, c_out = "cluster_out";
    double c_beta = 0.06, c_gamma = 0.1;
    std::size_t c_cut = 16;
    std::vector<std::string> c_exclude;
    bool c_export_d = false;
    auto* cluster_cmd =
        app.add_subcommand("cluster", "Agglomerate registry alleles under OWA linkage");
    cluster_cmd->add_option("--fasta", c_fasta, "FASTA input");
    cluster_cmd->add_option("--distances", c_distances,
                            "Precomputed distance matrix TSV (skips the gram build)");
    cluster_cmd->add_option("--beta", c_beta, "Allele-kernel exponent")->capture_default_str();
    cluster_cmd->add_option("--gamma", c_gamma, "OWA weight sharpness")->capture_default_str();
    cluster_cmd->add_option("--cut", c_cut, "Cluster count for the cut summary")
        ->capture_default_str();
    cluster_cmd->add_option("--exclude-family", c_exclude,
                            "Family left out of the clustered subset (repeatable)");
    cluster_cmd->add_flag("--export-distances", c_export_d, "Also write the distance matrix");
    cluster_cmd->add_option("--out-dir", c_out, "Output directory")->capture_default_str();

    // selftest
    auto* selftest_cmd = app.add_subcommand("selftest", "Run the offline property suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    try {
        if (gram_cmd->parsed())
            return cmd_gram(g_fasta, g_seqs, g_beta, g_kmax, g_avg, threads, g_out, g_cache_dir,
                            g_export);
        if (registry_cmd->parsed())
            return cmd_registry(r_fasta, r_out, r_exclude, r_keep_nonexpressed, r_exclusive);
        if (fixed_cmd->parsed())
            return cmd_predict_fixed(pf_data, pf_raw, pf_base, pf_betas, pf_lambdas, pf_kmax,
                                     threads, pf_assign, seed, pf_modulus, pf_out);
        if (pan_cmd->parsed())
            return cmd_predict_pan(pp_data, pp_fasta, pp_raw, pp_base, pp_beta_peptide, pp_betas,
                                   pp_lambdas, pp_kmax, threads, pp_assign, seed, pp_out);
        if (cluster_cmd->parsed())
            return cmd_cluster(c_fasta, c_distances, c_beta, c_gamma, c_cut, c_exclude, threads,
                               c_out, c_export_d);
        if (selftest_cmd->parsed())
            return cmd_selftest(seed);
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
