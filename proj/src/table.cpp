#include "transport/table.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace transport {

void PotentialOutcomeTable::add(const PopulationId& p, const Stratum& v, int y0,
                                int y1, const Rat& mass) {
    if (y0 != 0 && y0 != 1) throw ParseError("y0 must be 0 or 1");
    if (y1 != 0 && y1 != 1) throw ParseError("y1 must be 0 or 1");
    if (mass < Rat(0)) throw ParseError("negative mass");
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b)
            cells_.try_emplace({p, v, a, b}, Rat(0));
    cells_[{p, v, y0, y1}] += mass;
}

Rat PotentialOutcomeTable::mass(const PopulationId& p, const Stratum& v, int y0,
                                int y1) const {
    auto it = cells_.find({p, v, y0, y1});
    return it == cells_.end() ? Rat(0) : it->second;
}

Rat PotentialOutcomeTable::stratum_mass(const PopulationId& p, const Stratum& v) const {
    Rat total(0);
    for (int y0 = 0; y0 <= 1; ++y0)
        for (int y1 = 0; y1 <= 1; ++y1) total += mass(p, v, y0, y1);
    return total;
}

Rat PotentialOutcomeTable::population_mass(const PopulationId& p) const {
    Rat total(0);
    for (const auto& [k, m] : cells_)
        if (std::get<0>(k) == p) total += m;
    return total;
}

std::vector<PopulationId> PotentialOutcomeTable::populations() const {
    std::set<PopulationId> seen;
    for (const auto& [k, m] : cells_) seen.insert(std::get<0>(k));
    return {seen.begin(), seen.end()};
}

std::vector<Stratum> PotentialOutcomeTable::strata(const PopulationId& p) const {
    std::set<Stratum> seen;
    for (const auto& [k, m] : cells_)
        if (std::get<0>(k) == p) seen.insert(std::get<1>(k));
    return {seen.begin(), seen.end()};
}

Rat PotentialOutcomeTable::stratum_weight(const PopulationId& p, const Stratum& v) const {
    Rat pop = population_mass(p);
    if (pop == Rat(0))
        throw EmptyCell("population '" + p + "' has zero mass");
    return stratum_mass(p, v) / pop;
}

Rat PotentialOutcomeTable::counterfactual_risk(const PopulationId& p, const Stratum& v,
                                               int a) const {
    Rat total = stratum_mass(p, v);
    if (total == Rat(0))
        throw EmptyCell("zero mass in population '" + p + "', stratum " + v.key());
    Rat events(0);
    for (int y0 = 0; y0 <= 1; ++y0)
        for (int y1 = 0; y1 <= 1; ++y1)
            if ((a == 0 ? y0 : y1) == 1) events += mass(p, v, y0, y1);
    return events / total;
}

Rat PotentialOutcomeTable::marginal_counterfactual_risk(const PopulationId& p,
                                                        int a) const {
    Rat total = population_mass(p);
    if (total == Rat(0))
        throw EmptyCell("population '" + p + "' has zero mass");
    Rat events(0);
    for (const auto& [k, m] : cells_) {
        if (std::get<0>(k) != p) continue;
        int y = a == 0 ? std::get<2>(k) : std::get<3>(k);
        if (y == 1) events += m;
    }
    return events / total;
}

PotentialOutcomeTable PotentialOutcomeTable::marginalize(
    const std::vector<std::string>& keep) const {
    for (const auto& name : keep)
        if (std::find(covariates_.begin(), covariates_.end(), name) == covariates_.end())
            throw UnknownNode("covariate '" + name + "' not in table");
    PotentialOutcomeTable out(keep);
    for (const auto& [k, m] : cells_) {
        const auto& [p, v, y0, y1] = k;
        std::vector<std::pair<std::string, int>> kept;
        for (const auto& asg : v.assignments())
            if (std::find(keep.begin(), keep.end(), asg.first) != keep.end())
                kept.push_back(asg);
        out.add(p, Stratum(kept), y0, y1, m);
    }
    return out;
}

PotentialOutcomeTable PotentialOutcomeTable::pooled() const {
    return marginalize({});
}

PotentialOutcomeTable read_table_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty joint table file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            auto b = f.find_first_not_of(" \t\r");
            auto e = f.find_last_not_of(" \t\r");
            header.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
        }
    }
    if (header.size() < 4 || header.front() != "population" ||
        header[header.size() - 3] != "y0" || header[header.size() - 2] != "y1" ||
        header.back() != "mass")
        throw ParseError("joint table header must be population,<covariates...>,y0,y1,mass");
    std::vector<std::string> covariates(header.begin() + 1, header.end() - 3);

    PotentialOutcomeTable table(covariates);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields");
        try {
            std::vector<std::pair<std::string, int>> asg;
            for (size_t i = 0; i < covariates.size(); ++i)
                asg.emplace_back(covariates[i], std::stoi(fields[1 + i]));
            int y0 = std::stoi(fields[fields.size() - 3]);
            int y1 = std::stoi(fields[fields.size() - 2]);
            table.add(fields[0], Stratum(asg), y0, y1, Rat::parse(fields.back()));
        } catch (const std::invalid_argument&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad numeric field");
        }
    }
    return table;
}

PotentialOutcomeTable read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_table_csv(in);
}

void write_table_csv(const PotentialOutcomeTable& table, std::ostream& out) {
    out << "population";
    for (const auto& c : table.covariates()) out << "," << c;
    out << ",y0,y1,mass\n";
    for (const auto& [k, m] : table.cells()) {
        const auto& [p, v, y0, y1] = k;
        out << p;
        for (const auto& c : table.covariates()) out << "," << v.level(c);
        out << "," << y0 << "," << y1 << "," << m.str() << "\n";
    }
}

} // namespace transport
