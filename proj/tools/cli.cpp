#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "agml/corpus.hpp"
#include "agml/dataset.hpp"
#include "agml/errors.hpp"
#include "agml/eval.hpp"
#include "agml/graph.hpp"
#include "agml/protocol_impact.hpp"

namespace agml::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << bytes;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T v{};
    in >> v;
    if (!in || !in.eof() || (std::is_unsigned_v<T> && value.find('-') != std::string::npos))
        throw Error(ErrorCode::InvalidArgument, key + ": not a number: '" + value + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

Group parse_group_arg(const std::string& text) {
    auto g = parse_group(text);
    if (!g) throw UsageError("--group: unknown group '" + text + "'");
    return *g;
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : "NA"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json metrics_json(const MetricsReport& r) {
    return {{"tp", r.matrix.tp},         {"fp", r.matrix.fp},
            {"fn", r.matrix.fn},         {"tn", r.matrix.tn},
            {"npv", opt_json(r.npv)},    {"precision", opt_json(r.precision)},
            {"recall", opt_json(r.recall)}, {"f1", opt_json(r.f1)},
            {"mcc", opt_json(r.mcc)},    {"accuracy", opt_json(r.accuracy)}};
}

std::string metrics_csv_row(const std::string& name, const MetricsReport& r) {
    const auto& m = r.matrix;
    return name + "," + std::to_string(m.tp) + "," + std::to_string(m.fp) + "," +
           std::to_string(m.fn) + "," + std::to_string(m.tn) + "," + fmt_opt(r.npv) + "," +
           fmt_opt(r.precision) + "," + fmt_opt(r.recall) + "," + fmt_opt(r.f1) + "," +
           fmt_opt(r.mcc) + "," + fmt_opt(r.accuracy) + "\n";
}

constexpr const char* kMetricsHeader = "tp,fp,fn,tn,npv,precision,recall,f1,mcc,accuracy";

struct Workspace {
    CorpusFile corpus;
    OperationTable ops;
    DomainGraphs graphs;
    std::vector<BranchSample> samples;
    LabelReport label_report;
    bool labeled = false;
};

CorpusFile load_valid_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw UsageError("--corpus is required");
    CorpusFile corpus = load_corpus(cfg.corpus);
    std::size_t errors = 0;
    std::string first;
    for (const auto& i : validate_corpus(corpus))
        if (i.severity == ValidationIssue::Severity::Error && errors++ == 0)
            first = i.code + ": " + i.message;
    if (errors)
        throw Error(ErrorCode::MalformedInput, cfg.corpus + " has " + std::to_string(errors) +
                                                   " validation error(s); first: " + first);
    return corpus;
}

Workspace load_workspace(const RunConfig& cfg, bool need_labels, std::ostream& err) {
    Workspace w;
    w.corpus = load_valid_corpus(cfg);
    w.ops = w.corpus.operation_table();
    w.graphs = build_domain_graphs(w.corpus);
    w.samples = generate_candidates(w.graphs.graphs, w.ops, CandidateMode::Both);
    if (!cfg.labels.empty()) {
        w.label_report = apply_labels(w.samples, load_label_table(cfg.labels));
        w.labeled = true;
        for (const auto& c : w.label_report.conflicts)
            err << "warning: label -1 for existing edge " << c.first << " -> " << c.second
                << " ignored\n";
        if (!w.label_report.unknown_pairs.empty())
            err << "warning: " << w.label_report.unknown_pairs.size()
                << " label row(s) match no candidate\n";
    } else if (need_labels) {
        throw UsageError("--labels is required");
    }
    return w;
}

struct GroupData {
    std::vector<BranchSample> train, test, unlabeled;
};

std::map<Group, GroupData> split_groups(const Workspace& w, const RunConfig& cfg) {
    std::map<Group, std::vector<BranchSample>> labeled;
    std::map<Group, GroupData> out;
    for (Group g : kAllGroups) out[g];
    for (const auto& s : w.samples) {
        if (s.label == Label::Unlabeled) out[s.group()].unlabeled.push_back(s);
        else labeled[s.group()].push_back(s);
    }
    for (auto& [g, list] : labeled) {
        auto split = split_train_test(list, cfg.ratio, derive_seed(cfg.seed, 100 + static_cast<int>(g)));
        out[g].train = std::move(split.train);
        out[g].test = std::move(split.test);
    }
    return out;
}

// ---------------------------------------------------------------------------

void cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.corpus.empty()) throw UsageError("--corpus is required");
    CorpusFile corpus = load_corpus(cfg.corpus);
    auto issues = validate_corpus(corpus);
    std::size_t errors = 0, warnings = 0;
    json list = json::array();
    for (const auto& i : issues) {
        bool is_error = i.severity == ValidationIssue::Severity::Error;
        (is_error ? errors : warnings)++;
        list.push_back({{"severity", is_error ? "error" : "warning"},
                        {"code", i.code},
                        {"message", i.message}});
        if (is_error) err << "error: " << i.code << ": " << i.message << "\n";
    }
    json j{{"operations", corpus.operations.size()},
           {"vectors", corpus.vectors.size()},
           {"errors", errors},
           {"warnings", warnings},
           {"issues", list}};
    write_file(fs::path(cfg.out) / "validation.json", j.dump(2) + "\n");
    out << "validate: " << corpus.operations.size() << " operations, " << corpus.vectors.size()
        << " vectors, " << errors << " errors, " << warnings << " warnings\n";
    if (errors)
        throw Error(ErrorCode::MalformedInput, std::to_string(errors) + " validation error(s)");
}

void cmd_build_graphs(const RunConfig& cfg, std::ostream& out) {
    CorpusFile corpus = load_valid_corpus(cfg);
    DomainGraphs dg = build_domain_graphs(corpus);
    json logs = json::object();
    std::string line = "build-graphs:";
    for (std::size_t i = 0; i < dg.graphs.size(); ++i) {
        const auto& g = dg.graphs[i];
        const auto& log = dg.logs[i];
        std::string name(to_string(g.domain()));
        write_file(fs::path(cfg.out) / "graphs" / (name + ".json"), export_json(g));
        logs[name] = {{"input_graphs", log.input_graphs},
                      {"source_paths", log.source_paths},
                      {"aggregate_paths", log.aggregate_paths},
                      {"emergent", log.emergent},
                      {"subsumed", log.subsumed}};
        line += " " + name + " " + std::to_string(g.nodes().size()) + "n/" +
                std::to_string(g.edges().size()) + "e";
    }
    write_file(fs::path(cfg.out) / "aggregation_log.json", logs.dump(2) + "\n");
    out << line << "\n";
}

void cmd_paths(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    CorpusFile corpus = load_valid_corpus(cfg);
    DomainGraphs dg = build_domain_graphs(corpus);
    json j = json::object();
    std::size_t total = 0;
    std::string line = "paths:";
    for (const auto& g : dg.graphs) {
        std::string name(to_string(g.domain()));
        auto e = enumerate_paths(g);
        if (e.overflow) err << "warning: " << name << " path enumeration truncated\n";
        j["domains"][name] = {{"count", e.paths.size()}, {"overflow", e.overflow}, {"paths", e.paths}};
        total += e.paths.size();
        line += " " + name + " " + std::to_string(e.paths.size()) + ",";
    }
    j["total"] = total;
    write_file(fs::path(cfg.out) / "paths.json", j.dump(2) + "\n");
    out << line << " total " << total << "\n";
}

void cmd_candidates(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Workspace w = load_workspace(cfg, false, err);
    std::string csv = "src,dst,src_domain,dst_domain,group,origin\n";
    std::map<Origin, std::size_t> by_origin;
    for (const auto& s : w.samples) {
        csv += s.src + "," + s.dst + "," + std::string(to_string(s.src_domain)) + "," +
               std::string(to_string(s.dst_domain)) + "," + std::string(to_string(s.group())) +
               "," + std::string(to_string(s.origin)) + "\n";
        ++by_origin[s.origin];
    }
    write_file(fs::path(cfg.out) / "candidates.csv", csv);
    out << "candidates: " << w.samples.size() << " samples (" << by_origin[Origin::ExistingEdge]
        << " existing edges, " << by_origin[Origin::CandidateIntra] << " intra, "
        << by_origin[Origin::CandidateInter] << " inter)\n";
}

void cmd_encode(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Workspace w = load_workspace(cfg, false, err);
    std::vector<BranchSample> rows;
    for (const auto& s : w.samples)
        if (!cfg.group || s.group() == *cfg.group) rows.push_back(s);
    write_file(fs::path(cfg.out) / "dataset.csv", format_dataset_csv(rows));
    std::size_t pos = 0, neg = 0;
    for (const auto& s : rows) {
        pos += s.label == Label::Positive;
        neg += s.label == Label::Negative;
    }
    out << "encode: " << rows.size() << " rows, " << pos << " positive, " << neg << " negative, "
        << rows.size() - pos - neg << " unlabeled\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Workspace w = load_workspace(cfg, true, err);
    auto groups = split_groups(w, cfg);

    std::string cv_csv = std::string("group,classifier,resample_n,") + kMetricsHeader + ",selected\n";
    json ens{{"format_version", 1},
             {"seed", cfg.seed},
             {"ratio", cfg.ratio},
             {"folds", cfg.folds},
             {"precision_floor", cfg.precision_floor},
             {"groups", json::object()}};
    std::string line = "train:";

    for (Group g : kAllGroups) {
        const auto& gd = groups.at(g);
        std::string gname(to_string(g));
        LabeledData data = to_labeled_data(gd.train);
        FoldPlan folds = stratified_folds(gd.train, static_cast<std::size_t>(cfg.folds),
                                          derive_seed(cfg.seed, 200 + static_cast<int>(g)));
        std::vector<Candidate> cands;
        std::vector<std::string> notes;
        for (ClassifierSpec spec : candidate_specs(cfg, g)) {
            ResampleChoice choice =
                select_resample_n(spec, data, folds, cfg.resample_min, cfg.resample_max);
            if (spec.kind != ClassifierKind::Csp) spec.resample_n = choice.n;
            cands.push_back({spec, choice.cv.mean});
            if (!choice.note.empty()) notes.push_back(spec.display_name() + ": " + choice.note);
        }
        auto sel = select_ensemble({{g, cands}}, cfg.precision_floor).at(g);
        for (const auto& c : cands) {
            std::string n = c.spec.resample_n ? std::to_string(*c.spec.resample_n) : "";
            cv_csv += metrics_csv_row(gname + "," + c.spec.display_name() + "," + n, c.cv);
            cv_csv.back() = ',';
            cv_csv += (c.spec == sel.chosen.spec ? "1\n" : "0\n");
        }
        TrainedModel model = fit(sel.chosen.spec, data);
        std::string rel = "models/" + gname + ".json";
        write_file(fs::path(cfg.out) / rel, save_model(model));
        ens["groups"][gname] = {{"model", rel},
                                {"chosen", sel.chosen.spec.display_name()},
                                {"kind", std::string(to_string(sel.chosen.spec.kind))},
                                {"resample_n", sel.chosen.spec.resample_n
                                                   ? json(*sel.chosen.spec.resample_n)
                                                   : json(nullptr)},
                                {"cv", metrics_json(sel.chosen.cv)},
                                {"excluded", sel.excluded},
                                {"notes", notes},
                                {"train", gd.train.size()},
                                {"test", gd.test.size()}};
        line += " " + gname + "=" + sel.chosen.spec.display_name() + ";";
    }
    write_file(fs::path(cfg.out) / "cv_metrics.csv", cv_csv);
    write_file(fs::path(cfg.out) / "ensemble.json", ens.dump(2) + "\n");
    line.pop_back();
    out << line << "\n";
}

struct LoadedEnsemble {
    json meta;
    EnsembleModel model;
};

LoadedEnsemble load_ensemble(const RunConfig& cfg) {
    fs::path path = cfg.model.empty() ? fs::path(cfg.out) / "ensemble.json" : fs::path(cfg.model);
    json meta;
    try {
        meta = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw MalformedInput(0, path.string() + ": " + e.what());
    }
    try {
        if (meta.at("seed").get<std::uint64_t>() != cfg.seed ||
            meta.at("ratio").get<double>() != cfg.ratio)
            throw Error(ErrorCode::InvalidArgument,
                        path.string() + " was trained with seed " + meta.at("seed").dump() +
                            " and ratio " + meta.at("ratio").dump() +
                            "; evaluating under a different split would leak training rows");
        std::map<Group, TrainedModel> models;
        for (Group g : kAllGroups) {
            auto rel = meta.at("groups").at(std::string(to_string(g))).at("model").get<std::string>();
            models.emplace(g, load_model(read_file(path.parent_path() / rel)));
        }
        return {meta, EnsembleModel(std::move(models))};
    } catch (const json::exception& e) {
        throw MalformedInput(0, path.string() + ": " + e.what());
    }
}

struct Evaluation {
    std::map<Group, MetricsReport> by_group;
    MetricsReport total;
};

Evaluation evaluate(const EnsembleModel& ens, const std::map<Group, GroupData>& groups) {
    Evaluation ev;
    ConfusionMatrix sum;
    for (const auto& [g, gd] : groups) {
        std::vector<Label> pred, truth;
        for (const auto& s : gd.test) {
            pred.push_back(ens.predict(s));
            truth.push_back(s.label);
        }
        ConfusionMatrix m = confusion(pred, truth);
        sum += m;
        ev.by_group[g] = metrics(m);
    }
    ev.total = metrics(sum);
    return ev;
}

json evaluation_json(const Evaluation& ev) {
    json j = json::object();
    for (const auto& [g, r] : ev.by_group) j[std::string(to_string(g))] = metrics_json(r);
    j["ensemble"] = metrics_json(ev.total);
    return j;
}

ExploitReport predict(const EnsembleModel& ens, const std::map<Group, GroupData>& groups) {
    std::vector<BranchSample> cands;
    for (const auto& [g, gd] : groups) {
        cands.insert(cands.end(), gd.test.begin(), gd.test.end());
        cands.insert(cands.end(), gd.unlabeled.begin(), gd.unlabeled.end());
    }
    return predict_novel(ens, cands);
}

json exploits_json(const ExploitReport& r) {
    json pos = json::array();
    for (const auto& x : r.positives)
        pos.push_back({{"src", x.src},
                       {"dst", x.dst},
                       {"group", std::string(to_string(x.group))},
                       {"src_domain", std::string(to_string(x.src_domain))},
                       {"dst_domain", std::string(to_string(x.dst_domain))},
                       {"features", x.features}});
    json cbg = json::object(), pbg = json::object();
    for (const auto& [g, n] : r.candidates_by_group) cbg[std::string(to_string(g))] = n;
    for (const auto& [g, n] : r.positives_by_group) pbg[std::string(to_string(g))] = n;
    return {{"positives", pos},
            {"candidates", r.candidates},
            {"candidates_by_group", cbg},
            {"positives_by_group", pbg},
            {"reduction", opt_json(r.reduction)}};
}

struct Scored {
    LoadedEnsemble ens;
    std::map<Group, GroupData> groups;
};

Scored score(const RunConfig& cfg, std::ostream& err) {
    Workspace w = load_workspace(cfg, true, err);
    LoadedEnsemble ens = load_ensemble(cfg);
    return {std::move(ens), split_groups(w, cfg)};
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Scored s = score(cfg, err);
    Evaluation ev = evaluate(s.ens.model, s.groups);
    std::string csv = std::string("group,") + kMetricsHeader + "\n";
    for (const auto& [g, r] : ev.by_group) csv += metrics_csv_row(std::string(to_string(g)), r);
    csv += metrics_csv_row("ensemble", ev.total);
    write_file(fs::path(cfg.out) / "metrics.csv", csv);
    write_file(fs::path(cfg.out) / "metrics.json", evaluation_json(ev).dump(2) + "\n");
    out << "evaluate: " << ev.total.matrix.total() << " test samples, NPV "
        << fmt_opt(ev.total.npv) << ", precision " << fmt_opt(ev.total.precision) << ", recall "
        << fmt_opt(ev.total.recall) << ", MCC " << fmt_opt(ev.total.mcc) << "\n";
}

void cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Scored s = score(cfg, err);
    ExploitReport r = predict(s.ens.model, s.groups);
    write_file(fs::path(cfg.out) / "exploits.json", exploits_json(r).dump(2) + "\n");
    out << "predict: " << r.positives.size() << " predicted exploits among " << r.candidates
        << " candidates, reduction " << fmt_opt(r.reduction) << "\n";
}

TagTable require_tags(const RunConfig& cfg) {
    if (cfg.tags.empty()) throw UsageError("--tags is required");
    return load_tag_table(cfg.tags);
}

void cmd_aka_impact(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    TagTable tags = require_tags(cfg);
    Scored s = score(cfg, err);
    ImpactSummary impact = map_exploits_to_aka(predict(s.ens.model, s.groups), tags);
    write_file(fs::path(cfg.out) / "aka_impact.json", impact_to_json(impact) + "\n");
    std::string props;
    for (auto p : impact.violations) props += (props.empty() ? "" : ",") + std::string(to_string(p));
    out << "aka-impact: " << impact.exploits.size() << " protocol-relevant exploits, "
        << impact.protocol_neutral.size() << " neutral, violated {" << props << "}\n";
}

void cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Scored s = score(cfg, err);
    Evaluation ev = evaluate(s.ens.model, s.groups);
    ExploitReport r = predict(s.ens.model, s.groups);

    json groups = json::object();
    for (Group g : kAllGroups) {
        std::string name(to_string(g));
        const auto& meta = s.ens.meta.at("groups").at(name);
        groups[name] = {{"classifier", meta.at("chosen")},
                        {"resample_n", meta.at("resample_n")},
                        {"train", s.groups.at(g).train.size()},
                        {"test", s.groups.at(g).test.size()},
                        {"candidates", r.candidates_by_group.at(g)},
                        {"positives", r.positives_by_group.at(g)}};
    }
    json j{{"groups", groups},
           {"positives", exploits_json(r).at("positives")},
           {"reduction", opt_json(r.reduction)},
           {"metrics_by_group", evaluation_json(ev)},
           {"aka_impact", nullptr}};
    std::optional<ImpactSummary> impact;
    if (!cfg.tags.empty()) {
        impact = map_exploits_to_aka(r, load_tag_table(cfg.tags));
        j["aka_impact"] = json::parse(impact_to_json(*impact));
    }
    write_file(fs::path(cfg.out) / "report.json", j.dump(2) + "\n");

    std::ostringstream txt;
    txt << "group        classifier       train   test   NPV     precision recall  MCC\n";
    for (Group g : kAllGroups) {
        std::string name(to_string(g));
        const auto& m = ev.by_group.at(g);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-12s %-16s %5zu %6zu   %-7s %-9s %-7s %s\n", name.c_str(),
                      groups[name]["classifier"].get<std::string>().c_str(),
                      s.groups.at(g).train.size(), s.groups.at(g).test.size(),
                      fmt_opt(m.npv).c_str(), fmt_opt(m.precision).c_str(),
                      fmt_opt(m.recall).c_str(), fmt_opt(m.mcc).c_str());
        txt << buf;
    }
    const auto& t = ev.total;
    txt << "\nensemble on test: TP " << t.matrix.tp << " FP " << t.matrix.fp << " FN "
        << t.matrix.fn << " TN " << t.matrix.tn << "\n"
        << "  NPV " << fmt_opt(t.npv) << "  precision " << fmt_opt(t.precision) << "  recall "
        << fmt_opt(t.recall) << "  F1 " << fmt_opt(t.f1) << "  accuracy " << fmt_opt(t.accuracy)
        << "  MCC " << fmt_opt(t.mcc) << "\n";
    txt << "\npredicted exploits: " << r.positives.size() << " of " << r.candidates
        << " candidates (reduction " << fmt_opt(r.reduction) << ")\n";
    if (impact) {
        txt << "\nAKA impact:\n";
        for (const auto& [c, n] : impact->class_counts)
            txt << "  " << to_string(c) << ": " << n << "\n";
        std::string props;
        for (auto p : impact->violations) props += " " + std::string(to_string(p));
        txt << "  violated properties:" << (props.empty() ? " none" : props) << "\n";
    }
    write_file(fs::path(cfg.out) / "report.txt", txt.str());
    out << "report: NPV " << fmt_opt(t.npv) << ", " << r.positives.size()
        << " predicted exploits, reduction " << fmt_opt(r.reduction) << "\n";
}

void cmd_export_dot(const RunConfig& cfg, std::ostream& out) {
    CorpusFile corpus = load_valid_corpus(cfg);
    DomainGraphs dg = build_domain_graphs(corpus);
    std::size_t n = 0;
    for (const auto& g : dg.graphs) {
        if (cfg.group && group_of(g.domain()) != *cfg.group) continue;
        write_file(fs::path(cfg.out) / "dot" / (std::string(to_string(g.domain())) + ".dot"),
                   export_dot(g));
        ++n;
    }
    if (n == 0) throw UsageError("--group: no attack graph for the inter-graph group");
    out << "export-dot: wrote " << n << " graph(s) to " << (fs::path(cfg.out) / "dot").string()
        << "\n";
}

std::string resolve(const std::string& value, const std::string& base_dir) {
    if (base_dir.empty() || value.empty() || fs::path(value).is_absolute()) return value;
    return (fs::path(base_dir) / value).lexically_normal().string();
}

}  // namespace

void RunConfig::check() const {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::OutOfRange, m); };
    if (!(ratio > 0 && ratio < 1)) bad("ratio must lie in (0, 1)");
    if (folds < 2 || folds > 20) bad("folds must lie in [2, 20]");
    if (!(precision_floor >= 0 && precision_floor <= 1)) bad("precision floor must lie in [0, 1]");
    if (resample_min < kMinResample || resample_max > kMaxResample || resample_min > resample_max)
        bad("resample range must lie within [" + std::to_string(kMinResample) + ", " +
            std::to_string(kMaxResample) + "]");
    if (kinds.empty()) bad("no classifier kinds configured");
    if (knn_k < 1) bad("knn_k must be positive");
    for (const auto& [g, h] : mlp_hidden)
        if (h.first < 1 || h.second < 1) bad("MLP hidden sizes must be positive");
    if (out.empty()) bad("output directory is empty");
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& base_dir) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidArgument,
                        "config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        try {
            if (key == "corpus") cfg.corpus = resolve(value, base_dir);
            else if (key == "labels") cfg.labels = resolve(value, base_dir);
            else if (key == "tags") cfg.tags = resolve(value, base_dir);
            else if (key == "out") cfg.out = resolve(value, base_dir);
            else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
            else if (key == "ratio") cfg.ratio = parse_number<double>(key, value);
            else if (key == "folds") cfg.folds = parse_number<int>(key, value);
            else if (key == "precision_floor") cfg.precision_floor = parse_number<double>(key, value);
            else if (key == "resample_min") cfg.resample_min = parse_number<int>(key, value);
            else if (key == "resample_max") cfg.resample_max = parse_number<int>(key, value);
            else if (key == "knn_k") cfg.knn_k = parse_number<int>(key, value);
            else if (key == "kinds") {
                cfg.kinds.clear();
                for (const auto& name : split(value, ',')) {
                    auto k = parse_kind(name);
                    if (!k) throw Error(ErrorCode::InvalidArgument, "unknown classifier '" + name + "'");
                    cfg.kinds.push_back(*k);
                }
            } else if (key.rfind("mlp_hidden.", 0) == 0) {
                auto g = parse_group(key.substr(11));
                auto parts = split(value, ',');
                if (!g || parts.size() != 2)
                    throw Error(ErrorCode::InvalidArgument, "expected mlp_hidden.<group> = h1,h2");
                cfg.mlp_hidden[*g] = {parse_number<int>(key, parts[0]), parse_number<int>(key, parts[1])};
            } else {
                throw Error(ErrorCode::InvalidArgument, "unknown key '" + key + "'");
            }
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidArgument,
                        "config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<ClassifierSpec> candidate_specs(const RunConfig& cfg, Group g) {
    std::vector<ClassifierSpec> out;
    for (ClassifierKind k : cfg.kinds) {
        std::uint64_t seed = derive_seed(cfg.seed, 1000 + 10 * static_cast<int>(g) + static_cast<int>(k));
        ClassifierSpec s = make_spec(k, seed);
        if (k == ClassifierKind::Knn) s.hp.knn_k = cfg.knn_k;
        if (k == ClassifierKind::Mlp) {
            auto [h1, h2] = cfg.mlp_hidden.at(g);
            s.hp.mlp_h1 = h1;
            s.hp.mlp_h2 = h2;
        }
        out.push_back(s);
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attack-graph exploit prediction toolkit", "agml"};
    app.require_subcommand(1);

    struct Flags {
        std::string config, corpus, labels, tags, out, group, model;
        std::uint64_t seed = 0;
        double ratio = 0, precision_floor = 0;
        int folds = 0;
    } f;
    std::map<std::string, CLI::Option*> opts;

    static const std::vector<std::pair<std::string, std::string>> kCommands = {
        {"validate", "Check a corpus file and list problems"},
        {"build-graphs", "Aggregate attack vectors into one graph per domain"},
        {"paths", "Enumerate head-to-tail attack paths per domain"},
        {"candidates", "List candidate branches"},
        {"encode", "Write the 38-bit branch feature dataset"},
        {"train", "Cross-validate candidate classifiers and fit the per-group ensemble"},
        {"evaluate", "Score the ensemble on the held-out split"},
        {"predict", "Predict novel exploits among unseen candidates"},
        {"report", "Write the combined report"},
        {"aka-impact", "Map predicted exploits onto 5G-AKA properties"},
        {"export-dot", "Write Graphviz files for the domain graphs"},
    };
    for (const auto& [name, help] : kCommands) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto add = [&](const std::string& flag, auto& target, const std::string& desc) {
            CLI::Option* o = sub->add_option(flag, target, desc);
            opts[name + flag] = o;
        };
        add("--config", f.config, "key = value configuration file");
        add("--corpus", f.corpus, "attack-vector corpus");
        add("--labels", f.labels, "feasibility label table (CSV)");
        add("--tags", f.tags, "exploit tag table (JSON)");
        add("--seed", f.seed, "base random seed");
        add("--ratio", f.ratio, "train fraction of the split");
        add("--folds", f.folds, "cross-validation folds");
        add("--precision-floor", f.precision_floor, "minimum CV precision for selection");
        add("--out", f.out, "output directory");
        add("--group", f.group, "restrict to one group");
        add("--model", f.model, "ensemble.json to load");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    auto given = [&](const std::string& flag) { return opts.at(cmd + flag)->count() > 0; };

    try {
        RunConfig cfg;
        if (given("--config")) {
            auto base = fs::path(f.config).parent_path().string();
            apply_config_text(cfg, read_file(f.config), base);
        }
        if (const char* env = std::getenv("AGML_SEED"); env && *env) {
            try {
                cfg.seed = parse_number<std::uint64_t>("AGML_SEED", env);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
        }
        if (given("--corpus")) cfg.corpus = f.corpus;
        if (given("--labels")) cfg.labels = f.labels;
        if (given("--tags")) cfg.tags = f.tags;
        if (given("--out")) cfg.out = f.out;
        if (given("--model")) cfg.model = f.model;
        if (given("--seed")) cfg.seed = f.seed;
        if (given("--ratio")) cfg.ratio = f.ratio;
        if (given("--folds")) cfg.folds = f.folds;
        if (given("--precision-floor")) cfg.precision_floor = f.precision_floor;
        if (given("--group")) cfg.group = parse_group_arg(f.group);
        try {
            cfg.check();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }

        if (cmd == "validate") cmd_validate(cfg, out, err);
        else if (cmd == "build-graphs") cmd_build_graphs(cfg, out);
        else if (cmd == "paths") cmd_paths(cfg, out, err);
        else if (cmd == "candidates") cmd_candidates(cfg, out, err);
        else if (cmd == "encode") cmd_encode(cfg, out, err);
        else if (cmd == "train") cmd_train(cfg, out, err);
        else if (cmd == "evaluate") cmd_evaluate(cfg, out, err);
        else if (cmd == "predict") cmd_predict(cfg, out, err);
        else if (cmd == "report") cmd_report(cfg, out, err);
        else if (cmd == "aka-impact") cmd_aka_impact(cfg, out, err);
        else if (cmd == "export-dot") cmd_export_dot(cfg, out);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomainError;
    } catch (const fs::filesystem_error& e) {
        err << "error: Io: " << e.what() << "\n";
        return kExitDomainError;
    }
}

}  // namespace agml::cli
