#include "dymforge.h"

#include "errors.hpp"
#include "hdcore.hpp"
#include "laurent.hpp"
#include "report.hpp"

#include <cstdlib>
#include <cstring>
#include <map>
#include <string>

using namespace dymforge;

struct dym_session {
    std::map<std::string, std::string> kv;
};

struct dym_series {
    LaurentSeries s;
};

namespace {

thread_local std::string g_last_error;

dym_status fail(dym_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
        std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const std::map<std::string, std::string>& default_kv() {
    static const std::map<std::string, std::string> d = [] {
        std::map<std::string, std::string> m{
            {"order", "6"},        {"family", "8"}, {"lmax", "2"},
            {"format", "text"},    {"mode", "free"}, {"suite", "all"},
            {"seed", "0"},         {"n", "128"},    {"dt", "0"},
            {"steps", "0"},        {"sample_every", "1"},
            {"cap", "12"},         {"cache_dir", ""},
        };
        if (const char* env = std::getenv("DYMFORGE_CACHE"))
            m["cache_dir"] = env;
        return m;
    }();
    return d;
}

long parse_long(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(value, &used);
    } catch (const std::exception&) {
        throw DomainError(key + ": not an integer: " + value);
    }
    if (used != value.size())
        throw DomainError(key + ": not an integer: " + value);
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw DomainError(key + ": not a number: " + value);
    }
    if (used != value.size())
        throw DomainError(key + ": not a number: " + value);
    return v;
}

std::uint64_t parse_seed(const std::string& value) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw DomainError("seed: not an unsigned integer: " + value);
    }
    if (used != value.size())
        throw DomainError("seed: not an unsigned integer: " + value);
    return v;
}

const std::string& get(const dym_session& s, const std::string& key) {
    auto it = s.kv.find(key);
    if (it != s.kv.end())
        return it->second;
    return default_kv().at(key);
}

int get_window(const dym_session& s, const std::string& key) {
    const long v = parse_long(key, get(s, key));
    const long cap = parse_long("cap", get(s, "cap"));
    if (v < 0 || v > cap)
        throw DomainError(key + " must lie in 0.." + std::to_string(cap) +
                          " (cap); got " + get(s, key));
    return static_cast<int>(v);
}

dym_status map_exception() {
    try {
        throw;
    } catch (const ParseError& e) {
        return fail(DYM_ERR_PARSE, e.what());
    } catch (const NonFiniteStateError& e) {
        return fail(DYM_ERR_NUMERIC, e.what());
    } catch (const DomainError& e) {
        return fail(DYM_ERR_DOMAIN, e.what());
    } catch (const Error& e) {
        return fail(DYM_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(DYM_ERR_INTERNAL, e.what());
    }
}

template <typename Fn>
dym_status run_command(dym_session* s, char** out, Fn&& fn) {
    if (!s || !out)
        return fail(DYM_ERR_BADARG, "null session or output pointer");
    *out = nullptr;
    try {
        dym_status code = DYM_OK;
        std::string text = fn(*s, code);
        *out = dup_string(text);
        if (!*out)
            return fail(DYM_ERR_INTERNAL, "out of memory");
        return code;
    } catch (...) {
        return map_exception();
    }
}

} // namespace

extern "C" {

dym_session* dym_session_new(void) {
    return new (std::nothrow) dym_session{};
}

void dym_session_free(dym_session* s) {
    delete s;
}

dym_status dym_session_set(dym_session* s, const char* key, const char* value) {
    if (!s || !key || !value)
        return fail(DYM_ERR_BADARG, "null session, key, or value");
    const std::string k(key), v(value);
    if (!default_kv().count(k))
        return fail(DYM_ERR_BADARG, "unknown configuration key: " + k);
    try {
        if (k == "order" || k == "family" || k == "lmax" || k == "n" ||
            k == "steps" || k == "sample_every" || k == "cap")
            parse_long(k, v);
        else if (k == "dt")
            parse_double(k, v);
        else if (k == "seed")
            parse_seed(v);
        else if (k == "format")
            parse_format(v);
        else if (k == "mode" && v != "free" && v != "constrained")
            throw DomainError("mode must be free or constrained; got " + v);
    } catch (const Error& e) {
        return fail(DYM_ERR_BADARG, e.what());
    }
    s->kv[k] = v;
    return DYM_OK;
}

dym_status dym_run_hierarchy(dym_session* s, char** out) {
    return run_command(s, out, [](const dym_session& ses, dym_status&) {
        return render_hierarchy(get_window(ses, "order"), parse_format(get(ses, "format")),
                                get(ses, "cache_dir"));
    });
}

dym_status dym_run_currents(dym_session* s, char** out) {
    return run_command(s, out, [](const dym_session& ses, dym_status&) {
        return render_currents(get_window(ses, "lmax"), get_window(ses, "order"),
                               get(ses, "mode") == "constrained",
                               parse_format(get(ses, "format")), get(ses, "cache_dir"));
    });
}

dym_status dym_run_central(dym_session* s, char** out) {
    return run_command(s, out, [](const dym_session& ses, dym_status&) {
        return render_central(get_window(ses, "family"), get_window(ses, "order"),
                              parse_format(get(ses, "format")));
    });
}

dym_status dym_run_simulate(dym_session* s, char** out) {
    return run_command(s, out, [](const dym_session& ses, dym_status&) {
        SimulateRequest req;
        req.n = static_cast<int>(parse_long("n", get(ses, "n")));
        req.dt = parse_double("dt", get(ses, "dt"));
        req.steps = parse_long("steps", get(ses, "steps"));
        req.sample_every =
            static_cast<int>(parse_long("sample_every", get(ses, "sample_every")));
        req.seed = parse_seed(get(ses, "seed"));
        return render_simulate(req, parse_format(get(ses, "format")));
    });
}

dym_status dym_run_verify(dym_session* s, char** out) {
    return run_command(s, out, [](const dym_session& ses, dym_status& code) {
        bool all_passed = false;
        std::string text =
            render_verify(get(ses, "suite"), get_window(ses, "order"),
                          get_window(ses, "family"), parse_seed(get(ses, "seed")),
                          parse_format(get(ses, "format")), all_passed);
        if (!all_passed) {
            code = DYM_ERR_VERIFY;
            g_last_error = "verification failed";
        }
        return text;
    });
}

const char* dym_last_error(void) {
    return g_last_error.c_str();
}

void dym_string_free(char* s) {
    std::free(s);
}

dym_status dym_series_parse(const char* json, dym_series** out) {
    if (!json || !out)
        return fail(DYM_ERR_BADARG, "null text or output pointer");
    *out = nullptr;
    try {
        auto* handle = new dym_series{LaurentSeries::from_json(json, u_ring())};
        *out = handle;
        return DYM_OK;
    } catch (...) {
        return map_exception();
    }
}

dym_status dym_series_render(const dym_series* s, char** json_out) {
    if (!s || !json_out)
        return fail(DYM_ERR_BADARG, "null series or output pointer");
    *json_out = dup_string(s->s.to_json());
    if (!*json_out)
        return fail(DYM_ERR_INTERNAL, "out of memory");
    return DYM_OK;
}

int dym_series_equal(const dym_series* a, const dym_series* b) {
    if (!a || !b) {
        fail(DYM_ERR_BADARG, "null series handle");
        return -1;
    }
    return a->s == b->s ? 1 : 0;
}

void dym_series_free(dym_series* s) {
    delete s;
}

} // extern "C"
