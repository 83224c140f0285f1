#include <nlohmann/json.hpp>

#include "agml/errors.hpp"
#include "agml/learners.hpp"

namespace agml {

using json = nlohmann::json;

namespace {

int label_int(Label l) { return static_cast<int>(l); }

Label label_from(const json& j) {
    int v = j.get<int>();
    if (v == 1) return Label::Positive;
    if (v == -1) return Label::Negative;
    throw Error(ErrorCode::CorruptModel, "label must be +1 or -1");
}

json hp_to_json(const Hyperparameters& hp) {
    return {
        {"nb_var_smoothing", hp.nb_var_smoothing},
        {"tree_max_depth", hp.tree_max_depth},
        {"tree_min_leaf", hp.tree_min_leaf},
        {"knn_k", hp.knn_k},
        {"svm_c", hp.svm_c},
        {"svm_gamma", hp.svm_gamma},
        {"svm_tolerance", hp.svm_tolerance},
        {"svm_max_passes", hp.svm_max_passes},
        {"mlp_h1", hp.mlp_h1},
        {"mlp_h2", hp.mlp_h2},
        {"mlp_learning_rate", hp.mlp_learning_rate},
        {"mlp_epochs", hp.mlp_epochs},
    };
}

Hyperparameters hp_from_json(const json& j) {
    Hyperparameters hp;
    hp.nb_var_smoothing = j.at("nb_var_smoothing").get<double>();
    hp.tree_max_depth = j.at("tree_max_depth").get<int>();
    hp.tree_min_leaf = j.at("tree_min_leaf").get<int>();
    hp.knn_k = j.at("knn_k").get<int>();
    hp.svm_c = j.at("svm_c").get<double>();
    hp.svm_gamma = j.at("svm_gamma").get<double>();
    hp.svm_tolerance = j.at("svm_tolerance").get<double>();
    hp.svm_max_passes = j.at("svm_max_passes").get<int>();
    hp.mlp_h1 = j.at("mlp_h1").get<int>();
    hp.mlp_h2 = j.at("mlp_h2").get<int>();
    hp.mlp_learning_rate = j.at("mlp_learning_rate").get<double>();
    hp.mlp_epochs = j.at("mlp_epochs").get<int>();
    return hp;
}

json spec_json(const ClassifierSpec& s) {
    json j = hp_to_json(s.hp);
    j["resample_n"] = s.resample_n ? json(*s.resample_n) : json(nullptr);
    j["seed"] = s.seed;
    return j;
}

ClassifierSpec spec_from(const std::string& kind_name, const json& j) {
    auto kind = parse_kind(kind_name);
    if (!kind) throw Error(ErrorCode::CorruptModel, "unknown kind " + kind_name);
    ClassifierSpec s;
    s.kind = *kind;
    s.hp = hp_from_json(j);
    if (!j.at("resample_n").is_null()) s.resample_n = j.at("resample_n").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

json params_json(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, NbParams>) {
                return {{"prior", p.prior}, {"mean", p.mean}, {"var", p.var}, {"epsilon", p.epsilon}};
            } else if constexpr (std::is_same_v<P, TreeParams>) {
                json nodes = json::array();
                for (const auto& n : p.nodes)
                    nodes.push_back({n.feature, n.threshold, n.left, n.right, label_int(n.leaf)});
                return {{"nodes", nodes}};
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                json labels = json::array();
                for (auto l : p.labels) labels.push_back(label_int(l));
                return {{"k", p.k}, {"points", p.points}, {"labels", labels}};
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                return {{"gamma", p.gamma},     {"bias", p.bias},
                        {"support", p.support}, {"coef", p.coef},
                        {"iterations", p.iterations}, {"converged", p.converged}};
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                return {{"in", p.in}, {"h1", p.h1}, {"h2", p.h2}, {"w1", p.w1}, {"b1", p.b1},
                        {"w2", p.w2}, {"b2", p.b2}, {"w3", p.w3}, {"b3", p.b3},
                        {"final_loss", p.final_loss}};
            } else {
                return {{"positives", p.positives}};
            }
        },
        params);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::CorruptModel, what);
}

ModelParams params_from(ClassifierKind kind, const json& j, std::size_t width) {
    switch (kind) {
        case ClassifierKind::GaussianNb: {
            NbParams p;
            p.prior = j.at("prior").get<std::array<double, 2>>();
            p.mean = j.at("mean").get<std::array<std::vector<double>, 2>>();
            p.var = j.at("var").get<std::array<std::vector<double>, 2>>();
            p.epsilon = j.at("epsilon").get<double>();
            for (int c = 0; c < 2; ++c)
                require(p.mean[c].size() == width && p.var[c].size() == width, "nb shape");
            return p;
        }
        case ClassifierKind::DecisionTree: {
            TreeParams p;
            for (const auto& n : j.at("nodes")) {
                require(n.is_array() && n.size() == 5, "tree node shape");
                TreeNode t;
                t.feature = n[0].get<int>();
                t.threshold = n[1].get<double>();
                t.left = n[2].get<int>();
                t.right = n[3].get<int>();
                t.leaf = label_from(n[4]);
                p.nodes.push_back(t);
            }
            require(!p.nodes.empty(), "tree has no nodes");
            const int count = static_cast<int>(p.nodes.size());
            for (int i = 0; i < count; ++i) {
                const auto& t = p.nodes[i];
                if (t.feature < 0) continue;
                require(t.feature < static_cast<int>(width), "tree feature out of range");
                require(t.left > i && t.left < count && t.right > i && t.right < count,
                        "tree child out of range");
            }
            return p;
        }
        case ClassifierKind::Knn: {
            KnnParams p;
            p.k = j.at("k").get<int>();
            p.points = j.at("points").get<std::vector<std::vector<double>>>();
            for (const auto& l : j.at("labels")) p.labels.push_back(label_from(l));
            require(p.k >= 1 && p.points.size() == p.labels.size(), "knn shape");
            for (const auto& r : p.points) require(r.size() == width, "knn point width");
            return p;
        }
        case ClassifierKind::SvmRbf: {
            SvmParams p;
            p.gamma = j.at("gamma").get<double>();
            p.bias = j.at("bias").get<double>();
            p.support = j.at("support").get<std::vector<std::vector<double>>>();
            p.coef = j.at("coef").get<std::vector<double>>();
            p.iterations = j.at("iterations").get<std::size_t>();
            p.converged = j.at("converged").get<bool>();
            require(p.support.size() == p.coef.size(), "svm shape");
            for (const auto& r : p.support) require(r.size() == width, "svm support width");
            return p;
        }
        case ClassifierKind::Mlp: {
            MlpParams p;
            p.in = j.at("in").get<std::size_t>();
            p.h1 = j.at("h1").get<std::size_t>();
            p.h2 = j.at("h2").get<std::size_t>();
            p.w1 = j.at("w1").get<std::vector<double>>();
            p.b1 = j.at("b1").get<std::vector<double>>();
            p.w2 = j.at("w2").get<std::vector<double>>();
            p.b2 = j.at("b2").get<std::vector<double>>();
            p.w3 = j.at("w3").get<std::vector<double>>();
            p.b3 = j.at("b3").get<double>();
            p.final_loss = j.at("final_loss").get<double>();
            require(p.in == width && p.w1.size() == p.h1 * p.in && p.b1.size() == p.h1 &&
                        p.w2.size() == p.h2 * p.h1 && p.b2.size() == p.h2 && p.w3.size() == p.h2,
                    "mlp shape");
            return p;
        }
        case ClassifierKind::Csp: {
            CspParams p;
            for (const auto& r : j.at("positives")) {
                auto row = r.get<std::vector<double>>();
                require(row.size() == width, "csp row width");
                p.positives.insert(std::move(row));
            }
            return p;
        }
    }
    throw Error(ErrorCode::CorruptModel, "unknown kind");
}

}  // namespace

std::string save_model(const TrainedModel& model) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["kind"] = std::string(to_string(model.spec().kind));
    j["hyperparameters"] = spec_json(model.spec());
    json params = params_json(model.params());
    params["width"] = model.width();
    j["parameters"] = std::move(params);
    // nlohmann prints the shortest text that reads back to the same double.
    return j.dump(1) + "\n";
}

TrainedModel load_model(std::string_view bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptModel, e.what());
    }
    try {
        require(j.is_object(), "model file is not a JSON object");
        int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw Error(ErrorCode::VersionMismatch, "model format " + std::to_string(version) +
                                                        ", expected " +
                                                        std::to_string(kModelFormatVersion));
        ClassifierSpec spec = spec_from(j.at("kind").get<std::string>(), j.at("hyperparameters"));
        const json& params = j.at("parameters");
        auto width = params.at("width").get<std::size_t>();
        return TrainedModel(spec, width, params_from(spec.kind, params, width));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptModel, e.what());
    }
}

namespace detail {

std::string spec_to_json(const ClassifierSpec& spec) {
    json j = spec_json(spec);
    j["kind"] = std::string(to_string(spec.kind));
    return j.dump();
}

ClassifierSpec spec_from_json(std::string_view text) {
    try {
        json j = json::parse(text);
        return spec_from(j.at("kind").get<std::string>(), j);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptModel, e.what());
    }
}

}  // namespace detail

}  // namespace agml
