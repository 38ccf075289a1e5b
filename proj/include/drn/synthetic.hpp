#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drn/rng.hpp"
#include "drn/survey.hpp"

namespace drn {

/// Parameters for the seeded synthetic survey generator. Each tier has a pool
/// of organizations; selection probabilities are per respondent and may be
/// overridden per (group, tier) to plant tier affinity. `coupling` in [0,1]
/// ties the respondent's coordination answers to their connectedness latent:
/// 0 plants the null, 1 a strong monotone association.
struct GeneratorConfig {
    std::map<AgencyGroup, std::size_t> group_sizes = {{AgencyGroup::SLE, 39},
                                                      {AgencyGroup::SES, 37},
                                                      {AgencyGroup::LLE, 148}};
    std::map<int, std::size_t> pool_sizes = {{1, 15}, {2, 15}, {3, 15}};
    std::map<int, double> tier_probs = {{1, 0.15}, {2, 0.15}, {3, 0.15}};
    // (group, tier) -> per-respondent selection probability override
    std::map<std::pair<AgencyGroup, int>, double> group_tier_probs;
    double group_prob = 0.5;  // probability of selecting another agency-group org
    double coupling = 1.0;
    double answer_prob = 0.95;  // probability a scale item is answered at all

    double selection_prob(AgencyGroup g, int tier) const {
        auto it = group_tier_probs.find({g, tier});
        return it != group_tier_probs.end() ? it->second : tier_probs.at(tier);
    }

    void validate() const {
        auto check01 = [](double p, const char* what) {
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument(std::string(what) + " outside [0,1]");
        };
        for (const auto& [t, p] : tier_probs) check01(p, "tier selection probability");
        for (const auto& [gt, p] : group_tier_probs) check01(p, "group/tier selection probability");
        check01(group_prob, "group selection probability");
        check01(coupling, "coupling");
        check01(answer_prob, "answer probability");
        for (const auto& [t, s] : pool_sizes)
            if (s == 0) throw std::invalid_argument("empty tier pool");
    }
};

/// Generated dataset: records plus the codebook that describes them, so every
/// alter label is guaranteed to be covered by the codebook.
struct SyntheticDataset {
    Codebook codebook;
    std::vector<SurveyRecord> records;
};

namespace detail {

inline std::string org_label(int tier, std::size_t i) {
    std::ostringstream os;
    os << "Tier" << tier << " Org " << (i < 9 ? "0" : "") << (i + 1);
    return os.str();
}

inline int quantize(double value, int lo, int hi) {
    int v = static_cast<int>(std::lround(value));
    return std::max(lo, std::min(hi, v));
}

}  // namespace detail

/// Codebook matching the generator's organization roster: one relational
/// column per pool organization (tier known), one per agency-group
/// organization, two contact-frequency items, twelve usefulness items and the
/// preparedness item.
inline Codebook synthetic_codebook(const GeneratorConfig& cfg) {
    Codebook cb;
    cb.id_var = "RESPID";
    cb.group_var = "GROUP";
    cb.group_labels = {{AgencyGroup::SLE, "State Law Enforcement"},
                       {AgencyGroup::SES, "State Emergency Services"},
                       {AgencyGroup::LLE, "Local Law Enforcement"}};
    cb.group_tiers = {{AgencyGroup::SLE, 2}, {AgencyGroup::SES, 2}, {AgencyGroup::LLE, 2}};
    for (int tier : {1, 2, 3}) {
        for (std::size_t i = 0; i < cfg.pool_sizes.at(tier); ++i) {
            std::ostringstream col;
            col << "ORG_T" << tier << "_" << (i + 1);
            cb.relational_vars[col.str()] = RelationalVar{detail::org_label(tier, i), tier};
        }
    }
    cb.relational_vars["RSLE"] = RelationalVar{"State Law Enforcement", 2};
    cb.relational_vars["RSES"] = RelationalVar{"State Emergency Services", 2};
    cb.relational_vars["RLLE"] = RelationalVar{"Local Law Enforcement", 2};
    cb.frequency_vars = {"MEETMUN", "MEETSTA"};
    for (int i = 1; i <= 12; ++i) cb.usefulness_vars.push_back("IF" + std::to_string(i));
    cb.preparedness_var = "PREPARED";
    cb.validate();
    return cb;
}

/// Deterministic synthetic survey. Each respondent draws a connectedness
/// latent c and a coordination latent d = coupling*c + (1-coupling)*noise;
/// selections and contact frequency follow c, usefulness and preparedness
/// follow d, so the planted monotone association has the coupling's sign.
inline SyntheticDataset generate_synthetic(const GeneratorConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SyntheticDataset out;
    out.codebook = synthetic_codebook(cfg);
    Rng rng(seed);

    for (AgencyGroup g : kAgencyGroups) {
        const std::string& own_label = out.codebook.group_labels.at(g);
        for (std::size_t r = 0; r < cfg.group_sizes.at(g); ++r) {
            SurveyRecord rec;
            rec.resp_id = to_string(g) + "-" + std::to_string(r + 1);
            rec.agency_group = g;

            double c = rng.uniform();
            double d = cfg.coupling * c + (1.0 - cfg.coupling) * rng.uniform();

            for (int tier : {1, 2, 3}) {
                double p = std::min(1.0, cfg.selection_prob(g, tier) * 2.0 * c);
                for (std::size_t i = 0; i < cfg.pool_sizes.at(tier); ++i)
                    if (rng.bernoulli(p))
                        rec.relational_selections.insert(detail::org_label(tier, i));
            }
            for (AgencyGroup other : kAgencyGroups) {
                const std::string& label = out.codebook.group_labels.at(other);
                if (label == own_label) continue;
                if (rng.bernoulli(std::min(1.0, cfg.group_prob * 2.0 * c)))
                    rec.relational_selections.insert(label);
            }

            for (const auto& col : out.codebook.frequency_vars) {
                double noise = (rng.uniform() - 0.5) * 2.0;
                int code = detail::quantize(1.0 + (1.0 - c) * 5.0 + noise, 1, 6);
                if (rng.bernoulli(cfg.answer_prob)) rec.frequency_codes[col] = code;
            }
            for (const auto& col : out.codebook.usefulness_vars) {
                if (!rng.bernoulli(cfg.answer_prob)) continue;
                bool used = rng.bernoulli(0.15 + 0.7 * d);
                if (!used) {
                    rec.usefulness_codes[col] = 1;
                } else {
                    double noise = (rng.uniform() - 0.5) * 1.5;
                    rec.usefulness_codes[col] = detail::quantize(2.0 + d * 2.0 + noise, 2, 4);
                }
            }
            if (rng.bernoulli(cfg.answer_prob)) {
                double noise = (rng.uniform() - 0.5);
                rec.preparedness_code = detail::quantize(4.0 - d * 3.0 + noise, 1, 4);
            }
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

// Generator config file: `key=value` lines, `#` comments. Keys:
//   n_sle, n_ses, n_lle, pool_tier1..3, p_tier1..3,
//   p_<sle|ses|lle>_tier<1|2|3>, p_group, coupling, answer_prob

inline GeneratorConfig read_generator_config(std::istream& in) {
    GeneratorConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("generator config line " + std::to_string(lineno) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto as_size = [&] { return static_cast<std::size_t>(std::stoull(value)); };
        auto as_prob = [&] { return std::stod(value); };
        if (key == "n_sle") cfg.group_sizes[AgencyGroup::SLE] = as_size();
        else if (key == "n_ses") cfg.group_sizes[AgencyGroup::SES] = as_size();
        else if (key == "n_lle") cfg.group_sizes[AgencyGroup::LLE] = as_size();
        else if (key == "pool_tier1") cfg.pool_sizes[1] = as_size();
        else if (key == "pool_tier2") cfg.pool_sizes[2] = as_size();
        else if (key == "pool_tier3") cfg.pool_sizes[3] = as_size();
        else if (key == "p_tier1") cfg.tier_probs[1] = as_prob();
        else if (key == "p_tier2") cfg.tier_probs[2] = as_prob();
        else if (key == "p_tier3") cfg.tier_probs[3] = as_prob();
        else if (key == "p_group") cfg.group_prob = as_prob();
        else if (key == "coupling") cfg.coupling = as_prob();
        else if (key == "answer_prob") cfg.answer_prob = as_prob();
        else {
            bool matched = false;
            for (AgencyGroup g : kAgencyGroups) {
                for (int t : {1, 2, 3}) {
                    std::string want = "p_";
                    std::string gs = to_string(g);
                    for (char ch : gs) want += static_cast<char>(std::tolower(ch));
                    want += "_tier" + std::to_string(t);
                    if (key == want) {
                        cfg.group_tier_probs[{g, t}] = as_prob();
                        matched = true;
                    }
                }
            }
            if (!matched)
                throw std::runtime_error("generator config line " + std::to_string(lineno) +
                                         ": unknown key " + key);
        }
    }
    cfg.validate();
    return cfg;
}

inline GeneratorConfig read_generator_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open generator config: " + path);
    return read_generator_config(in);
}

}  // namespace drn
