#include "mdiqrng/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "mdiqrng/counts_csv.hpp"

namespace mdiqrng::config {

using ordered_json = nlohmann::ordered_json;

namespace {

// Strict section reader: every key present in the JSON object must be
// consumed by one of the field handlers.
class Section {
  public:
    Section(const ordered_json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void field(const char* key, T& out) {
        known_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key '" + name_ + "." + key + "': " + e.what());
        }
    }

    void enum_field(const char* key, const std::vector<std::pair<std::string, int>>& values,
                    int& out) {
        known_.insert(key);
        if (!j_.contains(key)) return;
        const std::string v = j_.at(key).get<std::string>();
        for (const auto& [name, val] : values) {
            if (name == v) {
                out = val;
                return;
            }
        }
        throw ConfigError("config key '" + name_ + "." + key + "': unknown value '" + v + "'");
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!known_.count(key)) {
                throw ConfigError("unknown config key '" + name_ + "." + key + "'");
            }
        }
    }

  private:
    const ordered_json& j_;
    std::string name_;
    std::set<std::string> known_;
};

}  // namespace

void RunConfig::validate() const {
    experiment.validate();
    detector.validate();
    if (loss_db < 0.0) throw ConfigError("loss_db must be nonnegative");
    if (!(options.tomography_fraction > 0.0 && options.tomography_fraction < 1.0)) {
        throw ConfigError("tomography_fraction must be in (0,1)");
    }
    if (options.optimizer.grid_points < 2) throw ConfigError("optimizer grid_points must be >= 2");
    if (options.optimizer.margin < 0.0) throw ConfigError("optimizer margin must be nonnegative");
    if (!(intensity_grid.mu_step > 0.0 && intensity_grid.nu_step > 0.0)) {
        throw ConfigError("intensity grid steps must be positive");
    }
    if (sweep.loss_step_db <= 0.0 || sweep.mu_step <= 0.0) {
        throw ConfigError("sweep steps must be positive");
    }
    if (sweep.loss_stop_db < sweep.loss_start_db || sweep.mu_stop < sweep.mu_start) {
        throw ConfigError("sweep ranges must be nonempty");
    }
    if (stability.seconds < 1) throw ConfigError("stability seconds must be >= 1");
    if (!(stability.rounds_per_second >= 8.0)) {
        throw ConfigError("stability rounds_per_second too small");
    }
    if (extractor.block_input_bits == 0) throw ConfigError("extractor block size must be positive");
    if (!(extractor.eps_ext > 0.0 && extractor.eps_ext < 1.0)) {
        throw ConfigError("extractor eps_ext must be in (0,1)");
    }
}

RunConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    RunConfig cfg;
    Section root(j, "");
    static const std::vector<const char*> sections = {
        "experiment", "detector", "options", "optimizer", "intensity_grid",
        "sweep",      "stability", "extractor"};
    for (const char* s : sections) {
        ordered_json dummy = ordered_json::object();
        root.field(s, dummy);
    }
    root.finish();

    if (j.contains("experiment")) {
        Section s(j["experiment"], "experiment");
        auto& e = cfg.experiment;
        s.field("mu", e.mu);
        s.field("nu", e.nu);
        s.field("n_rounds", e.n_rounds);
        s.field("eta_j", e.eta_j);
        s.field("p_s", e.p_s);
        s.field("epsilon", e.epsilon);
        s.field("clock_hz", e.clock_hz);
        s.finish();
    }
    if (j.contains("detector")) {
        Section s(j["detector"], "detector");
        auto& d = cfg.detector;
        s.field("eta", d.eta);
        s.field("p_d", d.p_d);
        s.field("eps_afterpulse", d.eps_afterpulse);
        s.field("e_prep", d.e_prep);
        s.finish();
    }
    if (j.contains("options")) {
        Section s(j["options"], "options");
        s.field("decoy", cfg.options.decoy);
        int pf = static_cast<int>(cfg.options.prefactor);
        s.enum_field("prefactor", {{"poisson", 0}, {"literal", 1}}, pf);
        cfg.options.prefactor = static_cast<entropy::Prefactor>(pf);
        int dt = static_cast<int>(cfg.options.dark_term);
        s.enum_field("dark_term", {{"halved", 0}, {"full", 1}}, dt);
        cfg.options.dark_term = static_cast<decoy::DarkTerm>(dt);
        int ap = static_cast<int>(cfg.afterpulse_model);
        s.enum_field("afterpulse_model", {{"mult", 0}, {"add", 1}}, ap);
        cfg.afterpulse_model = static_cast<sim::AfterpulseModel>(ap);
        s.field("fidelity", cfg.attach_fidelity);
        s.field("loss_db", cfg.loss_db);
        s.field("tomography_fraction", cfg.options.tomography_fraction);
        s.finish();
    }
    if (j.contains("optimizer")) {
        Section s(j["optimizer"], "optimizer");
        auto& o = cfg.options.optimizer;
        s.field("grid_points", o.grid_points);
        s.field("refine_count", o.refine_count);
        s.field("refine_max_iter", o.refine_max_iter);
        s.field("margin", o.margin);
        s.field("parallel", o.parallel);
        s.finish();
    }
    if (j.contains("intensity_grid")) {
        Section s(j["intensity_grid"], "intensity_grid");
        s.field("mu_step", cfg.intensity_grid.mu_step);
        s.field("nu_step", cfg.intensity_grid.nu_step);
        s.finish();
    }
    if (j.contains("sweep")) {
        Section s(j["sweep"], "sweep");
        auto& w = cfg.sweep;
        s.field("loss_start_db", w.loss_start_db);
        s.field("loss_stop_db", w.loss_stop_db);
        s.field("loss_step_db", w.loss_step_db);
        s.field("mu_start", w.mu_start);
        s.field("mu_stop", w.mu_stop);
        s.field("mu_step", w.mu_step);
        s.field("fixed_loss_db", w.fixed_loss_db);
        s.field("reoptimize", w.reoptimize);
        int m = static_cast<int>(w.mode);
        s.enum_field("mode", {{"entropy", 0}, {"fidelity", 1}}, m);
        w.mode = static_cast<SweepMode>(m);
        s.finish();
    }
    if (j.contains("stability")) {
        Section s(j["stability"], "stability");
        s.field("seconds", cfg.stability.seconds);
        s.field("rounds_per_second", cfg.stability.rounds_per_second);
        s.finish();
    }
    if (j.contains("extractor")) {
        Section s(j["extractor"], "extractor");
        s.field("block_input_bits", cfg.extractor.block_input_bits);
        s.field("eps_ext", cfg.extractor.eps_ext);
        s.finish();
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    return parse_config(io::read_file(path));
}

const char* sweep_mode_name(SweepMode m) {
    return m == SweepMode::Entropy ? "entropy" : "fidelity";
}
const char* prefactor_name(entropy::Prefactor p) {
    return p == entropy::Prefactor::Poisson ? "poisson" : "literal";
}
const char* dark_term_name(decoy::DarkTerm d) {
    return d == decoy::DarkTerm::Halved ? "halved" : "full";
}
const char* afterpulse_model_name(sim::AfterpulseModel m) {
    return m == sim::AfterpulseModel::Multiplicative ? "mult" : "add";
}

std::string serialize_config(const RunConfig& cfg) {
    ordered_json j;
    j["experiment"] = {{"mu", cfg.experiment.mu},
                       {"nu", cfg.experiment.nu},
                       {"n_rounds", cfg.experiment.n_rounds},
                       {"eta_j", cfg.experiment.eta_j},
                       {"p_s", cfg.experiment.p_s},
                       {"epsilon", cfg.experiment.epsilon},
                       {"clock_hz", cfg.experiment.clock_hz}};
    j["detector"] = {{"eta", cfg.detector.eta},
                     {"p_d", cfg.detector.p_d},
                     {"eps_afterpulse", cfg.detector.eps_afterpulse},
                     {"e_prep", cfg.detector.e_prep}};
    j["options"] = {{"decoy", cfg.options.decoy},
                    {"prefactor", prefactor_name(cfg.options.prefactor)},
                    {"dark_term", dark_term_name(cfg.options.dark_term)},
                    {"afterpulse_model", afterpulse_model_name(cfg.afterpulse_model)},
                    {"fidelity", cfg.attach_fidelity},
                    {"loss_db", cfg.loss_db},
                    {"tomography_fraction", cfg.options.tomography_fraction}};
    j["optimizer"] = {{"grid_points", cfg.options.optimizer.grid_points},
                      {"refine_count", cfg.options.optimizer.refine_count},
                      {"refine_max_iter", cfg.options.optimizer.refine_max_iter},
                      {"margin", cfg.options.optimizer.margin},
                      {"parallel", cfg.options.optimizer.parallel}};
    j["intensity_grid"] = {{"mu_step", cfg.intensity_grid.mu_step},
                           {"nu_step", cfg.intensity_grid.nu_step}};
    j["sweep"] = {{"loss_start_db", cfg.sweep.loss_start_db},
                  {"loss_stop_db", cfg.sweep.loss_stop_db},
                  {"loss_step_db", cfg.sweep.loss_step_db},
                  {"mu_start", cfg.sweep.mu_start},
                  {"mu_stop", cfg.sweep.mu_stop},
                  {"mu_step", cfg.sweep.mu_step},
                  {"fixed_loss_db", cfg.sweep.fixed_loss_db},
                  {"reoptimize", cfg.sweep.reoptimize},
                  {"mode", sweep_mode_name(cfg.sweep.mode)}};
    j["stability"] = {{"seconds", cfg.stability.seconds},
                      {"rounds_per_second", cfg.stability.rounds_per_second}};
    j["extractor"] = {{"block_input_bits", cfg.extractor.block_input_bits},
                      {"eps_ext", cfg.extractor.eps_ext}};
    return j.dump(2) + "\n";
}

}  // namespace mdiqrng::config
