#include "ldagan/serialization.hpp"

#include "ldagan/error.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ldagan {

namespace {

constexpr const char* kCheckpointFormat = "ldagan-checkpoint";

// Path-tracking accessors for parse errors.
const Json& field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(path + "." + key + ": missing field");
    }
    return *it;
}

double as_double(const Json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    return j.get<double>();
}

std::int64_t as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        throw ParseError(path + ": expected an integer");
    }
    return j.get<std::int64_t>();
}

std::uint64_t as_uint(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned()) {
        throw ParseError(path + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) {
        throw ParseError(path + ": expected a string");
    }
    return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
    if (!j.is_array()) {
        throw ParseError(path + ": expected an array");
    }
    return j;
}

std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::vector<double> double_list(const Json& j, const std::string& path) {
    std::vector<double> out;
    const Json& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(as_double(arr[i], at(path, i)));
    }
    return out;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v(i));
    }
    return out;
}

Matrix matrix_from_json(const Json& j, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    const Json& arr = as_array(j, path);
    if (static_cast<Eigen::Index>(arr.size()) != rows) {
        throw ParseError(path + ": expected " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::string rp = at(path, static_cast<std::size_t>(r));
        const Json& row = as_array(arr[static_cast<std::size_t>(r)], rp);
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw ParseError(rp + ": expected " + std::to_string(cols) + " columns");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = as_double(row[static_cast<std::size_t>(c)], at(rp, static_cast<std::size_t>(c)));
        }
    }
    return m;
}

Vector vector_from_json(const Json& j, const std::string& path, Eigen::Index size) {
    const std::vector<double> v = double_list(j, path);
    if (static_cast<Eigen::Index>(v.size()) != size) {
        throw ParseError(path + ": expected " + std::to_string(size) + " entries");
    }
    return Eigen::Map<const Vector>(v.data(), size);
}

Json gradient_to_json(const GradientBuffer& g) {
    Json layers = Json::array();
    for (const auto& l : g.layers) {
        layers.push_back({{"weights", matrix_to_json(l.weights)}, {"bias", vector_to_json(l.bias)}});
    }
    return layers;
}

GradientBuffer gradient_from_json(const Json& j, const std::string& path, const MlpParams& shape) {
    const Json& arr = as_array(j, path);
    if (arr.size() != shape.layers.size()) {
        throw ParseError(path + ": layer count does not match parameters");
    }
    GradientBuffer g;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string lp = at(path, i);
        const auto& ref = shape.layers[i];
        g.layers.push_back({matrix_from_json(field(arr[i], "weights", lp), lp + ".weights", ref.out_dim(), ref.in_dim()),
                            vector_from_json(field(arr[i], "bias", lp), lp + ".bias", ref.out_dim())});
    }
    return g;
}

std::vector<int> int_list(const Json& j, const std::string& key) {
    std::vector<int> out;
    if (!j.is_array()) {
        throw ConfigError("config key '" + key + "': expected an array of integers");
    }
    for (const auto& v : j) {
        if (!v.is_number_integer()) {
            throw ConfigError("config key '" + key + "': expected an array of integers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

Json config_to_json(const TrainConfig& c) {
    return Json{
        {"K", c.K},
        {"noise_dim", c.noise_dim},
        {"head_width", c.head_width},
        {"trunk_hidden", c.trunk_hidden},
        {"disc_hidden", c.disc_hidden},
        {"init", c.init},
        {"init_sigma", c.init_sigma},
        {"lr_d", c.lr_d},
        {"lr_g", c.lr_g},
        {"lr_alpha", c.lr_alpha},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_eps", c.adam_eps},
        {"real_batch", c.real_batch},
        {"per_gen", c.per_gen},
        {"fake_sampling", c.fake_sampling == FakeSampling::stratified ? "stratified" : "ancestral"},
        {"estep_tol", c.estep_tol},
        {"estep_max_iter", c.estep_max_iter},
        {"warmup_iterations", c.warmup_iterations},
        {"alpha_init", c.alpha_init},
        {"alpha_min", c.alpha_min},
        {"total_iterations", c.total_iterations},
        {"eval_interval", c.eval_interval},
        {"eval_samples", c.eval_samples},
        {"seed", c.seed},
    };
}

TrainConfig config_from_json(const Json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    const Json reference = config_to_json(TrainConfig{});
    for (const auto& [key, _] : j.items()) {
        if (!reference.contains(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    for (const auto& [key, _] : reference.items()) {
        if (!j.contains(key)) {
            throw ConfigError("missing required config key '" + key + "'");
        }
    }
    auto integer = [&](const char* key) -> std::int64_t {
        const Json& v = j.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(std::string("config key '") + key + "': expected an integer");
        }
        return v.get<std::int64_t>();
    };
    auto real = [&](const char* key) -> double {
        const Json& v = j.at(key);
        if (!v.is_number()) {
            throw ConfigError(std::string("config key '") + key + "': expected a number");
        }
        return v.get<double>();
    };
    auto text = [&](const char* key) -> std::string {
        const Json& v = j.at(key);
        if (!v.is_string()) {
            throw ConfigError(std::string("config key '") + key + "': expected a string");
        }
        return v.get<std::string>();
    };
    TrainConfig c;
    c.K = static_cast<int>(integer("K"));
    c.noise_dim = static_cast<int>(integer("noise_dim"));
    c.head_width = static_cast<int>(integer("head_width"));
    c.trunk_hidden = int_list(j.at("trunk_hidden"), "trunk_hidden");
    c.disc_hidden = int_list(j.at("disc_hidden"), "disc_hidden");
    c.init = text("init");
    c.init_sigma = real("init_sigma");
    c.lr_d = real("lr_d");
    c.lr_g = real("lr_g");
    c.lr_alpha = real("lr_alpha");
    c.adam_beta1 = real("adam_beta1");
    c.adam_beta2 = real("adam_beta2");
    c.adam_eps = real("adam_eps");
    c.real_batch = static_cast<int>(integer("real_batch"));
    c.per_gen = static_cast<int>(integer("per_gen"));
    const std::string sampling = text("fake_sampling");
    if (sampling == "stratified") {
        c.fake_sampling = FakeSampling::stratified;
    } else if (sampling == "ancestral") {
        c.fake_sampling = FakeSampling::ancestral;
    } else {
        throw ConfigError("config key 'fake_sampling': must be 'stratified' or 'ancestral'");
    }
    c.estep_tol = real("estep_tol");
    c.estep_max_iter = static_cast<int>(integer("estep_max_iter"));
    c.warmup_iterations = integer("warmup_iterations");
    c.alpha_init = real("alpha_init");
    c.alpha_min = real("alpha_min");
    c.total_iterations = integer("total_iterations");
    c.eval_interval = integer("eval_interval");
    c.eval_samples = static_cast<int>(integer("eval_samples"));
    if (!j.at("seed").is_number_unsigned()) {
        throw ConfigError("config key 'seed': expected a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

TrainConfig read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

Json mlp_to_json(const MlpParams& params) {
    Json layers = Json::array();
    for (const auto& l : params.layers) {
        layers.push_back({{"activation", std::string(to_string(l.activation))},
                          {"weights", matrix_to_json(l.weights)},
                          {"bias", vector_to_json(l.bias)}});
    }
    return Json{{"layers", std::move(layers)}};
}

MlpParams mlp_from_json(const Json& j, const std::string& path) {
    const std::string lpath = path + ".layers";
    const Json& arr = as_array(field(j, "layers", path), lpath);
    if (arr.empty()) {
        throw ParseError(lpath + ": network has no layers");
    }
    MlpParams params;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = at(lpath, i);
        const Json& w = as_array(field(arr[i], "weights", p), p + ".weights");
        const auto rows = static_cast<Eigen::Index>(w.size());
        if (rows == 0) {
            throw ParseError(p + ".weights: empty matrix");
        }
        const auto cols = static_cast<Eigen::Index>(as_array(w[0], p + ".weights[0]").size());
        LayerParams layer;
        try {
            layer.activation = activation_from_string(as_string(field(arr[i], "activation", p), p + ".activation"));
        } catch (const ParseError& e) {
            throw ParseError(p + ".activation: " + e.what());
        }
        layer.weights = matrix_from_json(w, p + ".weights", rows, cols);
        layer.bias = vector_from_json(field(arr[i], "bias", p), p + ".bias", rows);
        if (!params.layers.empty() && params.layers.back().out_dim() != cols) {
            throw ParseError(p + ".weights: input width does not chain with the previous layer");
        }
        params.layers.push_back(std::move(layer));
    }
    return params;
}

Json adam_to_json(const AdamState& s) {
    return Json{{"lr", s.config.lr},
                {"beta1", s.config.beta1},
                {"beta2", s.config.beta2},
                {"eps", s.config.eps},
                {"t", s.t},
                {"m", gradient_to_json(s.m)},
                {"v", gradient_to_json(s.v)}};
}

namespace {

AdamState adam_from_json_shaped(const Json& j, const std::string& path, const MlpParams& shape) {
    AdamState s;
    s.config.lr = as_double(field(j, "lr", path), path + ".lr");
    s.config.beta1 = as_double(field(j, "beta1", path), path + ".beta1");
    s.config.beta2 = as_double(field(j, "beta2", path), path + ".beta2");
    s.config.eps = as_double(field(j, "eps", path), path + ".eps");
    s.t = as_int(field(j, "t", path), path + ".t");
    s.m = gradient_from_json(field(j, "m", path), path + ".m", shape);
    s.v = gradient_from_json(field(j, "v", path), path + ".v", shape);
    return s;
}

MlpParams shape_from_moments(const Json& j, const std::string& path) {
    // Rebuild a parameter shape from the first-moment arrays.
    MlpParams shape;
    const Json& arr = as_array(field(j, "m", path), path + ".m");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string p = at(path + ".m", i);
        const Json& w = as_array(field(arr[i], "weights", p), p + ".weights");
        const auto rows = static_cast<Eigen::Index>(w.size());
        const auto cols = rows > 0 ? static_cast<Eigen::Index>(as_array(w[0], p + ".weights[0]").size()) : 0;
        shape.layers.push_back({Matrix::Zero(rows, cols), Vector::Zero(rows), Activation::identity});
    }
    return shape;
}

} // namespace

AdamState adam_from_json(const Json& j, const std::string& path) {
    return adam_from_json_shaped(j, path, shape_from_moments(j, path));
}

Json checkpoint_to_json(const TrainState& state, const TrainConfig& cfg) {
    Json heads = Json::array();
    for (const auto& h : state.bank.heads) {
        heads.push_back(mlp_to_json(h));
    }
    Json adam_heads = Json::array();
    for (const auto& a : state.adam_heads) {
        adam_heads.push_back(adam_to_json(a));
    }
    return Json{
        {"format", kCheckpointFormat},
        {"version", kCheckpointVersion},
        {"config", config_to_json(cfg)},
        {"iteration", state.iteration},
        {"alpha", state.alpha.values()},
        {"alpha_min", state.alpha.floor()},
        {"bank", {{"heads", std::move(heads)}, {"trunk", mlp_to_json(state.bank.trunk)}}},
        {"disc", mlp_to_json(state.disc.net)},
        {"adam", {{"disc", adam_to_json(state.adam_disc)},
                  {"heads", std::move(adam_heads)},
                  {"trunk", adam_to_json(state.adam_trunk)}}},
        {"rng", {{"seed", state.rng.seed()}, {"draws", state.rng.draws()}, {"state", state.rng.state()}}},
    };
}

Checkpoint checkpoint_from_json(const Json& j) {
    const std::string root = "checkpoint";
    if (as_string(field(j, "format", root), root + ".format") != kCheckpointFormat) {
        throw ParseError(root + ".format: not an ldagan checkpoint");
    }
    const std::int64_t version = as_int(field(j, "version", root), root + ".version");
    if (version != kCheckpointVersion) {
        throw VersionError(root + ".version: unsupported checkpoint version " + std::to_string(version) +
                           " (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint cp;
    try {
        cp.config = config_from_json(field(j, "config", root));
    } catch (const ConfigError& e) {
        throw ParseError(root + ".config: " + e.what());
    }
    TrainState& s = cp.state;
    s.iteration = as_int(field(j, "iteration", root), root + ".iteration");
    try {
        s.alpha = DirichletParams(double_list(field(j, "alpha", root), root + ".alpha"),
                                  as_double(field(j, "alpha_min", root), root + ".alpha_min"));
    } catch (const DomainError& e) {
        throw ParseError(root + ".alpha: " + e.what());
    }

    const Json& bank = field(j, "bank", root);
    const Json& heads = as_array(field(bank, "heads", root + ".bank"), root + ".bank.heads");
    for (std::size_t i = 0; i < heads.size(); ++i) {
        s.bank.heads.push_back(mlp_from_json(heads[i], at(root + ".bank.heads", i)));
    }
    if (s.bank.heads.empty()) {
        throw ParseError(root + ".bank.heads: no generators");
    }
    s.bank.trunk = mlp_from_json(field(bank, "trunk", root + ".bank"), root + ".bank.trunk");
    s.disc.net = mlp_from_json(field(j, "disc", root), root + ".disc");

    const Json& adam = field(j, "adam", root);
    s.adam_disc = adam_from_json_shaped(field(adam, "disc", root + ".adam"), root + ".adam.disc", s.disc.net);
    const Json& adam_heads = as_array(field(adam, "heads", root + ".adam"), root + ".adam.heads");
    if (adam_heads.size() != s.bank.heads.size()) {
        throw ParseError(root + ".adam.heads: count does not match bank.heads");
    }
    for (std::size_t i = 0; i < adam_heads.size(); ++i) {
        s.adam_heads.push_back(adam_from_json_shaped(adam_heads[i], at(root + ".adam.heads", i), s.bank.heads[i]));
    }
    s.adam_trunk = adam_from_json_shaped(field(adam, "trunk", root + ".adam"), root + ".adam.trunk", s.bank.trunk);

    const Json& rng = field(j, "rng", root);
    s.rng.restore(as_uint(field(rng, "seed", root + ".rng"), root + ".rng.seed"),
                  as_uint(field(rng, "draws", root + ".rng"), root + ".rng.draws"),
                  as_string(field(rng, "state", root + ".rng"), root + ".rng.state"));

    if (s.alpha.size() != s.bank.heads.size() || static_cast<int>(s.bank.heads.size()) != cp.config.K) {
        throw ParseError(root + ": K disagrees between config, alpha, and bank.heads");
    }
    if (s.bank.trunk.input_dim() != s.bank.heads.front().output_dim() || s.bank.trunk.output_dim() != 2 ||
        s.disc.net.input_dim() != 2 || s.disc.net.output_dim() != 1) {
        throw ParseError(root + ": network shapes are inconsistent");
    }
    return cp;
}

void save_checkpoint(const TrainState& state, const TrainConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << checkpoint_to_json(state, cfg).dump() << '\n';
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("checkpoint: malformed JSON: " + std::string(e.what()));
    }
    return checkpoint_from_json(j);
}

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

} // namespace

std::string metrics_to_jsonl(const MetricsRecord& r) {
    const Json j{
        {"iteration", r.iteration},
        {"d_loss", r.d_loss},
        {"g_losses", r.g_losses},
        {"alpha", r.alpha},
        {"modes_covered", optional_json(r.modes_covered)},
        {"hq_ratio", optional_json(r.hq_ratio)},
        {"usage_entropy", optional_json(r.usage_entropy)},
    };
    return j.dump();
}

MetricsRecord metrics_from_json(const Json& j) {
    const std::string root = "metrics";
    MetricsRecord r;
    r.iteration = as_int(field(j, "iteration", root), root + ".iteration");
    r.d_loss = as_double(field(j, "d_loss", root), root + ".d_loss");
    r.g_losses = double_list(field(j, "g_losses", root), root + ".g_losses");
    r.alpha = double_list(field(j, "alpha", root), root + ".alpha");
    const Json& mc = field(j, "modes_covered", root);
    if (!mc.is_null()) r.modes_covered = static_cast<int>(as_int(mc, root + ".modes_covered"));
    const Json& hq = field(j, "hq_ratio", root);
    if (!hq.is_null()) r.hq_ratio = as_double(hq, root + ".hq_ratio");
    const Json& ue = field(j, "usage_entropy", root);
    if (!ue.is_null()) r.usage_entropy = as_double(ue, root + ".usage_entropy");
    return r;
}

Json coverage_to_json(const CoverageReport& c) {
    return Json{{"modes_covered", c.modes_covered},
                {"hq_ratio", c.hq_ratio},
                {"per_mode_counts", c.per_mode_counts},
                {"usage_entropy", c.usage_entropy},
                {"purity", c.purity}};
}

} // namespace ldagan
