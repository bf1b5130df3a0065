#include "transport/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace transport {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace

Stratum::Stratum(std::vector<std::pair<std::string, int>> assignments)
    : assignments_(std::move(assignments)) {
    std::sort(assignments_.begin(), assignments_.end());
    for (size_t i = 1; i < assignments_.size(); ++i) {
        if (assignments_[i].first == assignments_[i - 1].first)
            throw ParseError("duplicate covariate '" + assignments_[i].first +
                             "' in stratum");
    }
}

int Stratum::level(const std::string& covariate) const {
    for (const auto& [name, lvl] : assignments_)
        if (name == covariate) return lvl;
    throw UnknownNode("covariate '" + covariate + "' not in stratum");
}

std::string Stratum::key() const {
    if (assignments_.empty()) return "-";
    std::string out;
    for (const auto& [name, lvl] : assignments_) {
        if (!out.empty()) out += ",";
        out += name + "=" + std::to_string(lvl);
    }
    return out;
}

std::string measure_name(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::RD: return "rd";
        case MeasureKind::RR: return "rr";
        case MeasureKind::OR: return "or";
    }
    return "?";
}

MeasureKind measure_from_name(const std::string& name) {
    std::string s;
    for (char c : name) s += static_cast<char>(std::tolower(c));
    if (s == "rd") return MeasureKind::RD;
    if (s == "rr") return MeasureKind::RR;
    if (s == "or") return MeasureKind::OR;
    throw ParseError("unknown effect measure '" + name + "'");
}

void StratifiedCounts::add(const PopulationId& p, const Stratum& v, int a, int y,
                           long long count) {
    if (a != 0 && a != 1) throw ParseError("treatment level must be 0 or 1");
    if (y != 0 && y != 1) throw ParseError("outcome level must be 0 or 1");
    if (count < 0) throw ParseError("negative count");
    // ensure all four (a,y) cells exist once a stratum appears
    for (int aa = 0; aa <= 1; ++aa)
        for (int yy = 0; yy <= 1; ++yy)
            cells_.try_emplace({p, v, aa, yy}, 0);
    cells_[{p, v, a, y}] += count;
}

long long StratifiedCounts::cell(const PopulationId& p, const Stratum& v, int a,
                                 int y) const {
    auto it = cells_.find({p, v, a, y});
    return it == cells_.end() ? 0 : it->second;
}

bool StratifiedCounts::has_stratum(const PopulationId& p, const Stratum& v) const {
    return cells_.count({p, v, 0, 0}) > 0;
}

std::vector<PopulationId> StratifiedCounts::populations() const {
    std::set<PopulationId> seen;
    for (const auto& [k, n] : cells_) seen.insert(std::get<0>(k));
    return {seen.begin(), seen.end()};
}

std::vector<Stratum> StratifiedCounts::strata(const PopulationId& p) const {
    std::set<Stratum> seen;
    for (const auto& [k, n] : cells_)
        if (std::get<0>(k) == p) seen.insert(std::get<1>(k));
    return {seen.begin(), seen.end()};
}

long long StratifiedCounts::stratum_total(const PopulationId& p, const Stratum& v) const {
    long long total = 0;
    for (int a = 0; a <= 1; ++a)
        for (int y = 0; y <= 1; ++y) total += cell(p, v, a, y);
    return total;
}

long long StratifiedCounts::population_total(const PopulationId& p) const {
    long long total = 0;
    for (const auto& [k, n] : cells_)
        if (std::get<0>(k) == p) total += n;
    return total;
}

StratifiedCounts StratifiedCounts::marginalize(const std::vector<std::string>& keep) const {
    for (const auto& name : keep)
        if (std::find(covariates_.begin(), covariates_.end(), name) == covariates_.end())
            throw UnknownNode("covariate '" + name + "' not in dataset");
    StratifiedCounts out(keep);
    for (const auto& [k, n] : cells_) {
        const auto& [p, v, a, y] = k;
        std::vector<std::pair<std::string, int>> kept;
        for (const auto& asg : v.assignments())
            if (std::find(keep.begin(), keep.end(), asg.first) != keep.end())
                kept.push_back(asg);
        out.add(p, Stratum(kept), a, y, n);
    }
    return out;
}

Risk risk(const StratifiedCounts& counts, const PopulationId& p, const Stratum& v, int a) {
    long long events = counts.cell(p, v, a, 1);
    long long total = events + counts.cell(p, v, a, 0);
    if (total == 0)
        throw EmptyCell("no observations for population '" + p + "', stratum " +
                        v.key() + ", a=" + std::to_string(a));
    return Risk{events, total};
}

Risk marginal_risk(const StratifiedCounts& counts, const PopulationId& p, int a) {
    long long events = 0, total = 0;
    for (const auto& v : counts.strata(p)) {
        events += counts.cell(p, v, a, 1);
        total += counts.cell(p, v, a, 1) + counts.cell(p, v, a, 0);
    }
    if (total == 0)
        throw EmptyCell("no observations for population '" + p + "', a=" +
                        std::to_string(a));
    return Risk{events, total};
}

double effect_measure_value(MeasureKind kind, const Rat& r1, const Rat& r0) {
    switch (kind) {
        case MeasureKind::RD:
            return (r1 - r0).to_double();
        case MeasureKind::RR:
            if (r0 == Rat(0))
                throw UndefinedMeasure("risk ratio undefined: baseline risk is 0");
            return (r1 / r0).to_double();
        case MeasureKind::OR: {
            if (r0 == Rat(0) || r0 == Rat(1) || r1 == Rat(0) || r1 == Rat(1))
                throw UndefinedMeasure(
                    "odds ratio undefined: a risk is at the boundary (" +
                    r1.str() + " vs " + r0.str() + ")");
            Rat o1 = r1 / (Rat(1) - r1);
            Rat o0 = r0 / (Rat(1) - r0);
            return (o1 / o0).to_double();
        }
    }
    return 0.0;
}

EffectMeasure effect_measure(MeasureKind kind, const Risk& risk1, const Risk& risk0) {
    return EffectMeasure{kind, effect_measure_value(kind, risk1.rat(), risk0.rat())};
}

StratifiedCounts read_counts_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty count file");
    auto header = split_csv_line(line);
    if (header.size() < 4 || header.front() != "population" ||
        header[header.size() - 3] != "a" || header[header.size() - 2] != "y" ||
        header.back() != "count")
        throw ParseError("count file header must be population,<covariates...>,a,y,count");
    std::vector<std::string> covariates(header.begin() + 1, header.end() - 3);

    StratifiedCounts counts(covariates);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields");
        try {
            std::vector<std::pair<std::string, int>> asg;
            for (size_t i = 0; i < covariates.size(); ++i)
                asg.emplace_back(covariates[i], std::stoi(fields[1 + i]));
            int a = std::stoi(fields[fields.size() - 3]);
            int y = std::stoi(fields[fields.size() - 2]);
            long long n = std::stoll(fields.back());
            counts.add(fields[0], Stratum(asg), a, y, n);
        } catch (const std::invalid_argument&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad numeric field");
        }
    }
    return counts;
}

StratifiedCounts read_counts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_counts_csv(in);
}

void write_counts_csv(const StratifiedCounts& counts, std::ostream& out) {
    out << "population";
    for (const auto& c : counts.covariates()) out << "," << c;
    out << ",a,y,count\n";
    for (const auto& [k, n] : counts.cells()) {
        const auto& [p, v, a, y] = k;
        out << p;
        for (const auto& c : counts.covariates()) out << "," << v.level(c);
        out << "," << a << "," << y << "," << n << "\n";
    }
}

Rat Rat::parse(const std::string& text) {
    try {
        return parse_impl(text);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("bad rational literal '" + text + "'");
    }
}

Rat Rat::parse_impl(const std::string& text) {
    std::string s = text;
    bool percent = false;
    if (!s.empty() && s.back() == '%') { percent = true; s.pop_back(); }
    Rat r;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        r = Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    } else {
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            r = Rat(std::stoll(s));
        } else {
            std::string frac = s.substr(dot + 1);
            if (frac.size() > 15) frac = frac.substr(0, 15);
            long long den = 1;
            for (size_t i = 0; i < frac.size(); ++i) den *= 10;
            std::string ip = s.substr(0, dot);
            bool neg = !ip.empty() && ip[0] == '-';
            long long whole = (ip.empty() || ip == "-" ) ? 0 : std::stoll(ip);
            long long fr = frac.empty() ? 0 : std::stoll(frac);
            r = Rat(whole, 1) + (neg ? -Rat(fr, den) : Rat(fr, den));
        }
    }
    if (percent) r /= Rat(100);
    return r;
}

} // namespace transport
