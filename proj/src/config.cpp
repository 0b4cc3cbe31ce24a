#include "cldyn/config.hpp"

#include <cmath>
#include <fstream>

#include "cldyn/errors.hpp"

namespace cldyn {

namespace {

using nlohmann::json;

std::string join_path(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& base,
                    std::initializer_list<const char*> allowed)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw config_error("config: unknown key \"" + join_path(base, it.key()) + "\"");
    }
}

const json* find(const json& obj, const char* key)
{
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& as_object(const json& v, const std::string& path)
{
    if (!v.is_object()) throw config_error("config: \"" + path + "\" must be an object");
    return v;
}

double as_number(const json& v, const std::string& path)
{
    if (!v.is_number()) throw config_error("config: \"" + path + "\" must be a number");
    return v.get<double>();
}

long long as_integer(const json& v, const std::string& path)
{
    if (!v.is_number_integer())
        throw config_error("config: \"" + path + "\" must be an integer");
    return v.get<long long>();
}

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string()) throw config_error("config: \"" + path + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> as_number_array(const json& v, const std::string& path)
{
    if (!v.is_array()) throw config_error("config: \"" + path + "\" must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

double get_number(const json& obj, const std::string& base, const char* key, double dflt)
{
    const json* v = find(obj, key);
    return v ? as_number(*v, join_path(base, key)) : dflt;
}

long long get_integer(const json& obj, const std::string& base, const char* key, long long dflt)
{
    const json* v = find(obj, key);
    return v ? as_integer(*v, join_path(base, key)) : dflt;
}

std::string get_string(const json& obj, const std::string& base, const char* key,
                       const std::string& dflt)
{
    const json* v = find(obj, key);
    return v ? as_string(*v, join_path(base, key)) : dflt;
}

void require(bool ok, const std::string& path, const std::string& valid_range)
{
    if (!ok)
        throw config_error("config: \"" + path + "\" out of range (" + valid_range + ")");
}

FeatureSpec parse_feature(const json& v, const std::string& path)
{
    as_object(v, path);
    const json* law = find(v, "law");
    if (!law) throw config_error("config: \"" + path + ".law\" is required");
    const std::string kind = as_string(*law, path + ".law");

    FeatureSpec fs;
    if (kind == "gaussian") {
        reject_unknown(v, path, {"law", "variance"});
        fs.kind = FeatureSpec::Kind::gaussian;
        fs.variance = get_number(v, path, "variance", 1.0);
        require(fs.variance > 0.0, path + ".variance", "need variance > 0");
    } else if (kind == "three_point") {
        reject_unknown(v, path, {"law", "alpha", "p", "m2"});
        fs.kind = FeatureSpec::Kind::three_point;
        const json* alpha = find(v, "alpha");
        const json* p = find(v, "p");
        const json* m2 = find(v, "m2");
        const int given = (alpha != nullptr) + (p != nullptr) + (m2 != nullptr);
        if (given < 2)
            throw config_error("config: \"" + path +
                               "\" three_point law needs two of \"alpha\", \"p\", \"m2\" (m2 = "
                               "alpha * p); missing \"" +
                               (m2 ? (alpha ? "p" : "alpha") : "m2") + "\"");
        double a = alpha ? as_number(*alpha, path + ".alpha") : 0.0;
        double pp = p ? as_number(*p, path + ".p") : 0.0;
        double mm = m2 ? as_number(*m2, path + ".m2") : 0.0;
        if (m2) require(mm > 0.0, path + ".m2", "need m2 > 0");
        if (!alpha)
            a = mm / pp;
        else if (!p)
            pp = mm / a;
        else if (m2 && std::abs(a * pp - mm) > 1e-9 * std::max(1.0, std::abs(mm)))
            throw config_error("config: \"" + path +
                               "\" three_point law is over-determined: alpha * p != m2");
        require(a > 0.0, path + ".alpha", "need alpha > 0");
        require(pp > 0.0 && pp <= 1.0, path + ".p", "need 0 < p <= 1");
        fs.alpha = a;
        fs.p = pp;
    } else if (kind == "moments") {
        reject_unknown(v, path, {"law", "m2", "m4", "m6"});
        fs.kind = FeatureSpec::Kind::moments;
        for (const char* key : {"m2", "m4", "m6"})
            if (!find(v, key))
                throw config_error("config: \"" + join_path(path, key) +
                                   "\" is required for a moments law");
        fs.mom.m2 = as_number(*find(v, "m2"), path + ".m2");
        fs.mom.m4 = as_number(*find(v, "m4"), path + ".m4");
        fs.mom.m6 = as_number(*find(v, "m6"), path + ".m6");
    } else if (kind == "discrete") {
        reject_unknown(v, path, {"law", "values", "probs"});
        fs.kind = FeatureSpec::Kind::discrete;
        const json* values = find(v, "values");
        const json* probs = find(v, "probs");
        if (!values || !probs)
            throw config_error("config: \"" + path +
                               "\" discrete law needs both \"values\" and \"probs\"");
        fs.values = as_number_array(*values, path + ".values");
        fs.probs = as_number_array(*probs, path + ".probs");
    } else {
        throw config_error("config: \"" + path + ".law\" must be one of \"gaussian\", "
                           "\"three_point\", \"moments\", \"discrete\" (got \"" +
                           kind + "\")");
    }

    try {
        fs.build();
    } catch (const config_error& e) {
        throw config_error("config: \"" + path + "\": " + e.what());
    }
    return fs;
}

json shorthand_model(const json& doc)
{
    json model = json::object();
    if (const json* v = find(doc, "activation")) model["activation"] = *v;
    if (const json* v = find(doc, "tau")) model["tau"] = *v;
    if (const json* v = find(doc, "m")) model["batch_size"] = *v;
    if (const json* v = find(doc, "moments")) {
        const std::vector<double> mom = as_number_array(*v, "moments");
        if (mom.size() != 3)
            throw config_error("config: \"moments\" must be [m2, m4, m6]");
        model["features"] = json::array(
            {json{{"law", "moments"}, {"m2", mom[0]}, {"m4", mom[1]}, {"m6", mom[2]}}});
    }
    return model;
}

void parse_model(const json& doc, ExperimentConfig& cfg)
{
    json owned;
    const json* section = find(doc, "model");
    const bool shorthand = find(doc, "activation") || find(doc, "tau") || find(doc, "m") ||
                           find(doc, "moments");
    if (section && shorthand)
        throw config_error("config: use either the \"model\" section or the top-level "
                           "shorthand keys (activation, tau, m, moments), not both");
    if (!section) {
        owned = shorthand_model(doc);
        section = &owned;
    }
    const json& obj = as_object(*section, "model");
    reject_unknown(obj, "model",
                   {"activation", "tau", "batch_size", "features", "noise", "prior",
                    "centering"});

    const std::string act = get_string(obj, "model", "activation", "quadratic");
    if (act == "quadratic")
        cfg.model.activation = Activation::quadratic();
    else if (act == "relu")
        cfg.model.activation = Activation::relu();
    else
        throw config_error("config: \"model.activation\" must be \"quadratic\" or \"relu\" "
                           "(got \"" +
                           act + "\")");

    cfg.model.tau = get_number(obj, "model", "tau", 0.1);
    require(cfg.model.tau > 0.0, "model.tau", "need tau > 0");
    const long long m = get_integer(obj, "model", "batch_size", 10);
    require(m >= 1, "model.batch_size", "need batch_size >= 1");
    cfg.model.m = static_cast<int>(m);

    cfg.features.clear();
    if (const json* features = find(obj, "features")) {
        if (!features->is_array() || features->empty())
            throw config_error("config: \"model.features\" must be a non-empty array");
        for (std::size_t i = 0; i < features->size(); ++i)
            cfg.features.push_back(
                parse_feature((*features)[i], "model.features[" + std::to_string(i) + "]"));
    } else {
        cfg.features.push_back(FeatureSpec{});
    }
    cfg.model.laws.clear();
    for (const FeatureSpec& fs : cfg.features) cfg.model.laws.push_back(fs.build());

    if (const json* noise = find(obj, "noise")) {
        const json& nobj = as_object(*noise, "model.noise");
        reject_unknown(nobj, "model.noise", {"kind", "eta", "rho"});
        const std::string kind = get_string(nobj, "model.noise", "kind", "none");
        if (kind == "none")
            cfg.model.noise.kind = NoiseModel::Kind::none;
        else if (kind == "independent")
            cfg.model.noise.kind = NoiseModel::Kind::independent;
        else if (kind == "anticorrelated")
            cfg.model.noise.kind = NoiseModel::Kind::anticorrelated;
        else if (kind == "correlated")
            cfg.model.noise.kind = NoiseModel::Kind::correlated;
        else
            throw config_error("config: \"model.noise.kind\" must be one of \"none\", "
                               "\"independent\", \"anticorrelated\", \"correlated\" (got \"" +
                               kind + "\")");
        cfg.model.noise.eta = get_number(nobj, "model.noise", "eta", 0.0);
        cfg.model.noise.rho = get_number(nobj, "model.noise", "rho", 0.0);
        require(cfg.model.noise.eta >= 0.0, "model.noise.eta", "need eta >= 0");
        require(cfg.model.noise.rho >= -1.0 && cfg.model.noise.rho <= 1.0, "model.noise.rho",
                "need -1 <= rho <= 1");
        // a noise sweep only takes the kind from here; eta is the swept variable
        if (cfg.model.noise.kind != NoiseModel::Kind::none && cfg.mode != RunMode::noise_sweep)
            require(cfg.model.noise.eta > 0.0, "model.noise.eta",
                    "need eta > 0 when the noise kind is not \"none\"");
    }

    if (const json* prior = find(obj, "prior")) {
        const json& pobj = as_object(*prior, "model.prior");
        reject_unknown(pobj, "model.prior", {"kind", "strength"});
        const std::string kind = get_string(pobj, "model.prior", "kind", "none");
        const double strength = get_number(pobj, "model.prior", "strength", 0.0);
        if (kind == "none")
            cfg.model.prior = Prior::none();
        else if (kind == "l2")
            cfg.model.prior = Prior::l2(strength);
        else
            throw config_error(
                "config: \"model.prior.kind\" must be \"none\" or \"l2\" (got \"" + kind +
                "\")");
    }

    const std::string centering = get_string(obj, "model", "centering", "zero");
    if (centering == "zero")
        cfg.model.centering = Centering::zero;
    else if (centering == "population")
        cfg.model.centering = Centering::population;
    else
        throw config_error("config: \"model.centering\" must be \"zero\" or \"population\" "
                           "(got \"" +
                           centering + "\")");
}

std::vector<double> parse_overlap_vector(const json& v, const std::string& path, int d1)
{
    std::vector<double> q = as_number_array(v, path);
    if (static_cast<int>(q.size()) != d1)
        throw config_error("config: \"" + path + "\" must have one entry per feature (" +
                           std::to_string(d1) + ")");
    double qq = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        require(std::isfinite(q[i]), path + "[" + std::to_string(i) + "]", "need a finite value");
        qq += q[i] * q[i];
    }
    require(qq <= 1.0 + 1e-12, path, "need |q| <= 1");
    return q;
}

std::vector<double> default_overlaps(int d1)
{
    // total squared overlap 0.1 split evenly across the features
    return std::vector<double>(d1, std::sqrt(0.1 / d1));
}

void parse_simulate(const json* section, ExperimentConfig& cfg)
{
    const int d1 = cfg.model.d1();
    SimulateSection& s = cfg.simulate;
    s.init.kind = SimInit::Kind::directed;
    s.init.Q0.assign(d1, 0.1 / d1);

    if (!section) return;
    const json& obj = as_object(*section, "simulate");
    reject_unknown(obj, "simulate", {"n", "t_max", "record_stride", "seeds", "init"});
    s.n = static_cast<int>(get_integer(obj, "simulate", "n", s.n));
    require(s.n >= d1 + 1, "simulate.n", "need n >= number of features + 1");
    s.t_max = get_number(obj, "simulate", "t_max", s.t_max);
    require(s.t_max > 0.0, "simulate.t_max", "need t_max > 0");
    s.record_stride =
        static_cast<long>(get_integer(obj, "simulate", "record_stride", s.record_stride));
    require(s.record_stride >= 0, "simulate.record_stride", "need record_stride >= 0 (0 = auto)");
    if (const json* seeds = find(obj, "seeds")) {
        if (!seeds->is_array() || seeds->empty())
            throw config_error("config: \"simulate.seeds\" must be a non-empty array");
        s.seeds.clear();
        for (std::size_t i = 0; i < seeds->size(); ++i) {
            const std::string path = "simulate.seeds[" + std::to_string(i) + "]";
            const long long v = as_integer((*seeds)[i], path);
            require(v >= 0, path, "need seed >= 0");
            s.seeds.push_back(static_cast<unsigned long long>(v));
        }
    }
    if (const json* init = find(obj, "init")) {
        const json& iobj = as_object(*init, "simulate.init");
        reject_unknown(iobj, "simulate.init", {"kind", "Q0"});
        const std::string kind = get_string(iobj, "simulate.init", "kind", "directed");
        if (kind == "random") {
            s.init.kind = SimInit::Kind::random;
            s.init.Q0.clear();
            if (find(iobj, "Q0"))
                throw config_error(
                    "config: \"simulate.init.Q0\" only applies to the directed init");
        } else if (kind == "directed") {
            s.init.kind = SimInit::Kind::directed;
            if (const json* q0 = find(iobj, "Q0")) {
                s.init.Q0 = as_number_array(*q0, "simulate.init.Q0");
                if (static_cast<int>(s.init.Q0.size()) != d1)
                    throw config_error("config: \"simulate.init.Q0\" must have one entry per "
                                       "feature (" +
                                       std::to_string(d1) + ")");
                double total = 0.0;
                for (std::size_t i = 0; i < s.init.Q0.size(); ++i) {
                    require(s.init.Q0[i] >= 0.0, "simulate.init.Q0[" + std::to_string(i) + "]",
                            "need Q0 >= 0");
                    total += s.init.Q0[i];
                }
                require(total <= 1.0 + 1e-12, "simulate.init.Q0", "need sum(Q0) <= 1");
            }
        } else {
            throw config_error("config: \"simulate.init.kind\" must be \"random\" or "
                               "\"directed\" (got \"" +
                               kind + "\")");
        }
    }
}

void parse_ode(const json* section, ExperimentConfig& cfg)
{
    OdeSection& o = cfg.ode;
    o.q0 = default_overlaps(cfg.model.d1());
    if (!section) return;
    const json& obj = as_object(*section, "ode");
    reject_unknown(obj, "ode", {"t_max", "dt", "record_dt", "variant", "rates", "q0"});
    o.t_max = get_number(obj, "ode", "t_max", o.t_max);
    o.dt = get_number(obj, "ode", "dt", o.dt);
    o.record_dt = get_number(obj, "ode", "record_dt", o.record_dt);
    require(o.dt > 0.0, "ode.dt", "need dt > 0");
    require(o.record_dt >= o.dt, "ode.record_dt", "need record_dt >= dt");
    require(o.t_max >= o.record_dt, "ode.t_max", "need t_max >= record_dt");
    const std::string variant = get_string(obj, "ode", "variant", "standard");
    if (variant == "standard")
        o.variant = DriftVariant::standard;
    else if (variant == "simplified")
        o.variant = DriftVariant::simplified;
    else
        throw config_error("config: \"ode.variant\" must be \"standard\" or \"simplified\" "
                           "(got \"" +
                           variant + "\")");
    const std::string rates = get_string(obj, "ode", "rates", "auto");
    if (rates == "auto")
        o.rates = OdeSection::Rates::automatic;
    else if (rates == "closed_form")
        o.rates = OdeSection::Rates::closed_form;
    else if (rates == "quadrature")
        o.rates = OdeSection::Rates::quadrature;
    else
        throw config_error("config: \"ode.rates\" must be \"auto\", \"closed_form\" or "
                           "\"quadrature\" (got \"" +
                           rates + "\")");
    if (const json* q0 = find(obj, "q0"))
        o.q0 = parse_overlap_vector(*q0, "ode.q0", cfg.model.d1());
}

void parse_pde(const json* section, ExperimentConfig& cfg)
{
    PdeConfig& p = cfg.pde;
    p.q0 = default_overlaps(cfg.model.d1());
    if (!section) return;
    const json& obj = as_object(*section, "pde");
    reject_unknown(obj, "pde",
                   {"w_max", "n_w", "n_u", "dt", "cfl", "t_max", "record_dt", "q0"});
    p.w_max = get_number(obj, "pde", "w_max", p.w_max);
    require(p.w_max > 0.0, "pde.w_max", "need w_max > 0");
    p.n_w = static_cast<int>(get_integer(obj, "pde", "n_w", p.n_w));
    require(p.n_w >= 8, "pde.n_w", "need n_w >= 8");
    p.n_u = static_cast<int>(get_integer(obj, "pde", "n_u", p.n_u));
    require(p.n_u >= 1, "pde.n_u", "need n_u >= 1");
    p.dt = get_number(obj, "pde", "dt", p.dt);
    require(p.dt >= 0.0, "pde.dt", "need dt >= 0 (0 = auto)");
    p.cfl = get_number(obj, "pde", "cfl", p.cfl);
    require(p.cfl > 0.0 && p.cfl <= 1.0, "pde.cfl", "need 0 < cfl <= 1");
    p.t_max = get_number(obj, "pde", "t_max", p.t_max);
    p.record_dt = get_number(obj, "pde", "record_dt", p.record_dt);
    require(p.record_dt > 0.0, "pde.record_dt", "need record_dt > 0");
    require(p.t_max >= p.record_dt, "pde.t_max", "need t_max >= record_dt");
    if (const json* q0 = find(obj, "q0"))
        p.q0 = parse_overlap_vector(*q0, "pde.q0", cfg.model.d1());
}

void parse_fixed_points(const json* section, ExperimentConfig& cfg)
{
    if (!section) return;
    const json& obj = as_object(*section, "fixed_points");
    reject_unknown(obj, "fixed_points", {"resolution", "grid"});
    cfg.fixed_points.resolution =
        static_cast<int>(get_integer(obj, "fixed_points", "resolution", cfg.fixed_points.resolution));
    require(cfg.fixed_points.resolution >= 10, "fixed_points.resolution",
            "need resolution >= 10");
    cfg.fixed_points.grid =
        static_cast<int>(get_integer(obj, "fixed_points", "grid", cfg.fixed_points.grid));
    require(cfg.fixed_points.grid >= 4, "fixed_points.grid", "need grid >= 4");
}

void parse_basins(const json* section, ExperimentConfig& cfg)
{
    if (!section) return;
    const json& obj = as_object(*section, "basins");
    reject_unknown(obj, "basins", {"grid", "t_max", "dt", "settle_tol"});
    BasinSection& b = cfg.basins;
    b.grid = static_cast<int>(get_integer(obj, "basins", "grid", b.grid));
    require(b.grid >= 2, "basins.grid", "need grid >= 2");
    b.t_max = get_number(obj, "basins", "t_max", b.t_max);
    require(b.t_max > 0.0, "basins.t_max", "need t_max > 0");
    b.dt = get_number(obj, "basins", "dt", b.dt);
    require(b.dt > 0.0 && b.dt <= b.t_max, "basins.dt", "need 0 < dt <= t_max");
    b.settle_tol = get_number(obj, "basins", "settle_tol", b.settle_tol);
    require(b.settle_tol > 0.0, "basins.settle_tol", "need settle_tol > 0");
}

void parse_noise_sweep(const json* section, ExperimentConfig& cfg)
{
    if (!section) return;
    const json& obj = as_object(*section, "noise_sweep");
    reject_unknown(obj, "noise_sweep", {"eta_max", "n_eta", "q_floor", "jump_tol"});
    NoiseSweepSection& ns = cfg.noise_sweep;
    ns.eta_max = get_number(obj, "noise_sweep", "eta_max", ns.eta_max);
    require(ns.eta_max > 0.0, "noise_sweep.eta_max", "need eta_max > 0");
    ns.n_eta = static_cast<int>(get_integer(obj, "noise_sweep", "n_eta", ns.n_eta));
    require(ns.n_eta >= 2, "noise_sweep.n_eta", "need n_eta >= 2");
    ns.q_floor = get_number(obj, "noise_sweep", "q_floor", ns.q_floor);
    require(ns.q_floor >= 0.0, "noise_sweep.q_floor", "need q_floor >= 0");
    ns.jump_tol = get_number(obj, "noise_sweep", "jump_tol", ns.jump_tol);
    require(ns.jump_tol > 0.0, "noise_sweep.jump_tol", "need jump_tol > 0");
}

void parse_output(const json* section, ExperimentConfig& cfg)
{
    if (!section) return;
    const json& obj = as_object(*section, "output");
    reject_unknown(obj, "output", {"path", "format", "density_path"});
    cfg.output.path = get_string(obj, "output", "path", cfg.output.path);
    cfg.output.density_path = get_string(obj, "output", "density_path", cfg.output.density_path);
    const std::string format = get_string(obj, "output", "format", "csv");
    if (format == "csv")
        cfg.output.format = OutputFormat::csv;
    else if (format == "jsonl")
        cfg.output.format = OutputFormat::jsonl;
    else
        throw config_error(
            "config: \"output.format\" must be \"csv\" or \"jsonl\" (got \"" + format + "\")");
}

bool quadratic_no_noise(const ModelParams& model)
{
    return model.activation.kind == Activation::Kind::quadratic &&
           model.noise.kind == NoiseModel::Kind::none;
}

void check_mode_requirements(const ExperimentConfig& cfg)
{
    const int d1 = cfg.model.d1();
    switch (cfg.mode) {
    case RunMode::noise_sweep: {
        if (d1 != 1)
            throw config_error("config: noise-sweep needs exactly one feature law");
        if (cfg.model.noise.kind != NoiseModel::Kind::independent &&
            cfg.model.noise.kind != NoiseModel::Kind::anticorrelated)
            throw config_error("config: noise-sweep needs model.noise.kind \"independent\" or "
                               "\"anticorrelated\"");
        if (cfg.model.activation.kind != Activation::Kind::quadratic)
            throw config_error("config: noise-sweep closed forms need the quadratic activation");
        const double m2 = cfg.model.laws[0].moments().m2;
        if (std::abs(m2 - 1.0) > 1e-9)
            throw config_error("config: noise-sweep closed forms need m2 = 1");
        break;
    }
    case RunMode::basins:
        if (d1 != 2)
            throw config_error("config: basins needs exactly two feature laws");
        if (!quadratic_no_noise(cfg.model))
            throw config_error("config: basins closed forms need the quadratic activation "
                               "and no view noise");
        break;
    case RunMode::fixed_points:
        if (d1 != 1 && d1 != 2)
            throw config_error("config: fixed-points supports one or two feature laws");
        if (d1 == 2 && !quadratic_no_noise(cfg.model))
            throw config_error("config: two-feature fixed-points need the quadratic "
                               "activation and no view noise");
        break;
    default: break;
    }
}

} // namespace

std::string to_string(RunMode mode)
{
    switch (mode) {
    case RunMode::simulate: return "simulate";
    case RunMode::ode: return "ode";
    case RunMode::pde: return "pde";
    case RunMode::fixed_points: return "fixed-points";
    case RunMode::basins: return "basins";
    case RunMode::noise_sweep: return "noise-sweep";
    default: return "compare";
    }
}

RunMode parse_run_mode(const std::string& name)
{
    if (name == "simulate") return RunMode::simulate;
    if (name == "ode") return RunMode::ode;
    if (name == "pde") return RunMode::pde;
    if (name == "fixed-points" || name == "fixed_points") return RunMode::fixed_points;
    if (name == "basins") return RunMode::basins;
    if (name == "noise-sweep" || name == "noise_sweep") return RunMode::noise_sweep;
    if (name == "compare") return RunMode::compare;
    throw config_error("config: unknown mode \"" + name +
                       "\" (valid: simulate, ode, pde, fixed-points, basins, noise-sweep, "
                       "compare)");
}

HiddenLaw FeatureSpec::build() const
{
    switch (kind) {
    case Kind::gaussian: return HiddenLaw::gaussian(variance);
    case Kind::three_point: return HiddenLaw::three_point(alpha, p);
    case Kind::moments: return HiddenLaw::from_moments(mom);
    default: return HiddenLaw::discrete(values, probs);
    }
}

SimConfig SimulateSection::single(unsigned long long seed) const
{
    SimConfig sc;
    sc.n = n;
    sc.t_max = t_max;
    sc.init = init;
    sc.record_stride = static_cast<int>(record_stride);
    sc.seed = seed;
    return sc;
}

ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<RunMode> cli_mode)
{
    if (!doc.is_object()) throw config_error("config: top level must be a json object");
    reject_unknown(doc, "",
                   {"mode", "model", "quadrature", "simulate", "ode", "pde", "fixed_points",
                    "basins", "noise_sweep", "output", "activation", "tau", "m", "moments"});

    ExperimentConfig cfg;
    const json* mode = find(doc, "mode");
    if (mode) {
        const RunMode file_mode = parse_run_mode(as_string(*mode, "mode"));
        if (cli_mode && *cli_mode != file_mode)
            throw config_error("config: mode \"" + to_string(file_mode) +
                               "\" does not match the subcommand \"" + to_string(*cli_mode) +
                               "\"");
        cfg.mode = file_mode;
    } else if (cli_mode) {
        cfg.mode = *cli_mode;
    } else {
        throw config_error("config: \"mode\" is required");
    }

    parse_model(doc, cfg);

    if (const json* quad = find(doc, "quadrature")) {
        const json& obj = as_object(*quad, "quadrature");
        reject_unknown(obj, "quadrature", {"n_e", "n_c", "n_gamma"});
        cfg.quadrature.n_e =
            static_cast<int>(get_integer(obj, "quadrature", "n_e", cfg.quadrature.n_e));
        require(cfg.quadrature.n_e >= 11, "quadrature.n_e", "need n_e >= 11");
        cfg.quadrature.n_c =
            static_cast<int>(get_integer(obj, "quadrature", "n_c", cfg.quadrature.n_c));
        require(cfg.quadrature.n_c >= 1, "quadrature.n_c", "need n_c >= 1");
        cfg.quadrature.n_gamma =
            static_cast<int>(get_integer(obj, "quadrature", "n_gamma", cfg.quadrature.n_gamma));
        require(cfg.quadrature.n_gamma >= 1, "quadrature.n_gamma", "need n_gamma >= 1");
    }

    parse_simulate(find(doc, "simulate"), cfg);
    parse_ode(find(doc, "ode"), cfg);
    parse_pde(find(doc, "pde"), cfg);
    parse_fixed_points(find(doc, "fixed_points"), cfg);
    parse_basins(find(doc, "basins"), cfg);
    parse_noise_sweep(find(doc, "noise_sweep"), cfg);
    parse_output(find(doc, "output"), cfg);

    if (cfg.mode == RunMode::noise_sweep && cfg.model.noise.eta == 0.0) {
        ModelParams relaxed = cfg.model;
        relaxed.noise.kind = NoiseModel::Kind::none;
        relaxed.validate();
    } else {
        cfg.model.validate();
    }
    check_mode_requirements(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<RunMode> cli_mode)
{
    std::ifstream is(path);
    if (!is) throw config_error("config: cannot read \"" + path + "\"");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("config: \"" + path + "\" is not valid json: " + e.what());
    }
    return parse_config(doc, cli_mode);
}

nlohmann::json to_json(const ExperimentConfig& cfg)
{
    using nlohmann::json;
    json j;
    j["mode"] = to_string(cfg.mode);

    json model;
    switch (cfg.model.activation.kind) {
    case Activation::Kind::quadratic: model["activation"] = "quadratic"; break;
    case Activation::Kind::relu: model["activation"] = "relu"; break;
    default: throw config_error("config: a custom activation cannot be serialized");
    }
    model["tau"] = cfg.model.tau;
    model["batch_size"] = cfg.model.m;
    json features = json::array();
    for (const FeatureSpec& fs : cfg.features) {
        json f;
        switch (fs.kind) {
        case FeatureSpec::Kind::gaussian:
            f = {{"law", "gaussian"}, {"variance", fs.variance}};
            break;
        case FeatureSpec::Kind::three_point:
            f = {{"law", "three_point"}, {"alpha", fs.alpha}, {"p", fs.p}};
            break;
        case FeatureSpec::Kind::moments:
            f = {{"law", "moments"}, {"m2", fs.mom.m2}, {"m4", fs.mom.m4}, {"m6", fs.mom.m6}};
            break;
        default:
            f = {{"law", "discrete"}, {"values", fs.values}, {"probs", fs.probs}};
            break;
        }
        features.push_back(std::move(f));
    }
    model["features"] = std::move(features);
    const char* noise_kind = "none";
    switch (cfg.model.noise.kind) {
    case NoiseModel::Kind::independent: noise_kind = "independent"; break;
    case NoiseModel::Kind::anticorrelated: noise_kind = "anticorrelated"; break;
    case NoiseModel::Kind::correlated: noise_kind = "correlated"; break;
    default: break;
    }
    model["noise"] = {{"kind", noise_kind}, {"eta", cfg.model.noise.eta},
                      {"rho", cfg.model.noise.rho}};
    switch (cfg.model.prior.kind) {
    case Prior::Kind::none: model["prior"] = {{"kind", "none"}, {"strength", 0.0}}; break;
    case Prior::Kind::l2:
        model["prior"] = {{"kind", "l2"}, {"strength", cfg.model.prior.strength}};
        break;
    default: throw config_error("config: a custom prior cannot be serialized");
    }
    model["centering"] =
        cfg.model.centering == Centering::population ? "population" : "zero";
    j["model"] = std::move(model);

    j["quadrature"] = {{"n_e", cfg.quadrature.n_e},
                       {"n_c", cfg.quadrature.n_c},
                       {"n_gamma", cfg.quadrature.n_gamma}};

    json sim;
    sim["n"] = cfg.simulate.n;
    sim["t_max"] = cfg.simulate.t_max;
    sim["record_stride"] = cfg.simulate.record_stride;
    sim["seeds"] = cfg.simulate.seeds;
    if (cfg.simulate.init.kind == SimInit::Kind::random)
        sim["init"] = {{"kind", "random"}};
    else
        sim["init"] = {{"kind", "directed"}, {"Q0", cfg.simulate.init.Q0}};
    j["simulate"] = std::move(sim);

    const char* rates = "auto";
    if (cfg.ode.rates == OdeSection::Rates::closed_form) rates = "closed_form";
    if (cfg.ode.rates == OdeSection::Rates::quadrature) rates = "quadrature";
    j["ode"] = {{"t_max", cfg.ode.t_max},
                {"dt", cfg.ode.dt},
                {"record_dt", cfg.ode.record_dt},
                {"variant",
                 cfg.ode.variant == DriftVariant::standard ? "standard" : "simplified"},
                {"rates", rates},
                {"q0", cfg.ode.q0}};

    j["pde"] = {{"w_max", cfg.pde.w_max},   {"n_w", cfg.pde.n_w},
                {"n_u", cfg.pde.n_u},       {"dt", cfg.pde.dt},
                {"cfl", cfg.pde.cfl},       {"t_max", cfg.pde.t_max},
                {"record_dt", cfg.pde.record_dt}, {"q0", cfg.pde.q0}};

    j["fixed_points"] = {{"resolution", cfg.fixed_points.resolution},
                         {"grid", cfg.fixed_points.grid}};
    j["basins"] = {{"grid", cfg.basins.grid},
                   {"t_max", cfg.basins.t_max},
                   {"dt", cfg.basins.dt},
                   {"settle_tol", cfg.basins.settle_tol}};
    j["noise_sweep"] = {{"eta_max", cfg.noise_sweep.eta_max},
                        {"n_eta", cfg.noise_sweep.n_eta},
                        {"q_floor", cfg.noise_sweep.q_floor},
                        {"jump_tol", cfg.noise_sweep.jump_tol}};
    j["output"] = {{"path", cfg.output.path},
                   {"format", to_string(cfg.output.format)},
                   {"density_path", cfg.output.density_path}};
    return j;
}

} // namespace cldyn
