#include "pulsegabor/aer.hpp"

#include "pulsegabor/pgm.hpp"

#include <algorithm>
#include <ostream>
#include <tuple>

namespace pulsegabor {

const char* port_name(Port port) {
    switch (port) {
    case Port::plus: return "plus";
    case Port::minus: return "minus";
    case Port::gate: return "gate";
    }
    return "?";
}

Port parse_port(const std::string& name) {
    if (name == "plus" || name == "+") return Port::plus;
    if (name == "minus" || name == "-") return Port::minus;
    if (name == "gate") return Port::gate;
    throw ConfigError("aer: unknown port '" + name + "'");
}

void RoutingTable::add_source(Address source) {
    if (source >= declared_.size()) {
        declared_.resize(static_cast<std::size_t>(source) + 1, 0);
        routes_.resize(declared_.size());
    }
    if (!declared_[source]) {
        declared_[source] = 1;
        ++source_count_;
    }
}

std::uint32_t RoutingTable::add_targets(std::size_t n) {
    const auto first = static_cast<std::uint32_t>(target_count_);
    target_count_ += n;
    return first;
}

void RoutingTable::connect(Address source, std::uint32_t target, Port port, double weight) {
    if (target >= target_count_)
        throw ConfigError("aer: route " + std::to_string(source) + " -> " + std::to_string(target) +
                          " names a missing target");
    if (!(weight >= 0.0)) throw ConfigError("aer: route weight must be >= 0");
    add_source(source);
    routes_[source].push_back({target, port, weight});
    ++entry_count_;
}

std::span<const RouteTarget> RoutingTable::targets(Address source) const {
    if (!has_source(source)) throw ConfigError("aer: event from unknown source " + std::to_string(source));
    return routes_[source];
}

nlohmann::json RoutingTable::to_json() const {
    nlohmann::json routes = nlohmann::json::array();
    std::vector<Address> silent;
    for (Address s = 0; s < declared_.size(); ++s) {
        if (!declared_[s]) continue;
        if (routes_[s].empty()) silent.push_back(s);
        for (const auto& r : routes_[s])
            routes.push_back({{"source", s}, {"target", r.target}, {"port", port_name(r.port)}, {"weight", r.weight}});
    }
    nlohmann::json j = {{"target_count", target_count_}, {"routes", routes}};
    if (!silent.empty()) j["silent_sources"] = silent;
    return j;
}

RoutingTable RoutingTable::from_json(const nlohmann::json& j) {
    try {
        const nlohmann::json& routes = j.is_array() ? j : j.at("routes");
        std::size_t targets = 0;
        if (j.is_object() && j.contains("target_count")) {
            targets = j.at("target_count").get<std::size_t>();
        } else {
            for (const auto& r : routes) targets = std::max(targets, r.at("target").get<std::size_t>() + 1);
        }
        RoutingTable table(targets);
        for (const auto& r : routes) {
            const double weight = r.contains("weight") ? r.at("weight").get<double>() : 1.0;
            table.connect(r.at("source").get<Address>(), r.at("target").get<std::uint32_t>(),
                          parse_port(r.at("port").get<std::string>()), weight);
        }
        if (j.is_object() && j.contains("silent_sources"))
            for (const auto& s : j.at("silent_sources")) table.add_source(s.get<Address>());
        return table;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("aer: malformed routing table: ") + e.what());
    }
}

std::vector<Delivery> route(std::vector<AddressEvent> events, const RoutingTable& table) {
    std::sort(events.begin(), events.end(),
              [](const AddressEvent& a, const AddressEvent& b) { return std::tie(a.tick, a.source) < std::tie(b.tick, b.source); });
    std::vector<Delivery> out;
    for (const auto& e : events)
        for (const auto& r : table.targets(e.source)) out.push_back({e.source, r.target, r.port, r.weight, e.tick});
    std::stable_sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
        return std::tie(a.tick, a.source, a.target, a.port) < std::tie(b.tick, b.source, b.target, b.port);
    });
    return out;
}

void PulseHistogram::record(Address address, std::uint64_t n) {
    if (address >= counts_.size()) throw ConfigError("histogram: address " + std::to_string(address) + " out of range");
    counts_[address] += n;
}

void PulseHistogram::record(std::span<const AddressEvent> events) {
    for (const auto& e : events) record(e.source);
}

void PulseHistogram::close_window(Tick t1) {
    if (t1 < t1_) throw ConfigError("histogram: window cannot shrink");
    t1_ = t1;
}

PulseHistogram& PulseHistogram::operator+=(const PulseHistogram& later) {
    if (later.counts_.size() != counts_.size()) throw ConfigError("histogram: address spaces differ");
    if (later.t0_ != t1_) throw ConfigError("histogram: windows are not adjacent");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += later.counts_[i];
    t1_ = later.t1_;
    return *this;
}

std::uint64_t PulseHistogram::total() const noexcept {
    std::uint64_t sum = 0;
    for (auto c : counts_) sum += c;
    return sum;
}

std::uint64_t PulseHistogram::max_count() const noexcept {
    return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

RealGrid PulseHistogram::to_grid(std::size_t width, std::size_t height) const {
    if (counts_.size() > width * height) {
        for (std::size_t a = width * height; a < counts_.size(); ++a)
            if (counts_[a] != 0) throw ConfigError("histogram: address " + std::to_string(a) + " outside grid");
    }
    RealGrid grid(width, height, 0.0);
    for (std::size_t a = 0; a < std::min(counts_.size(), grid.size()); ++a) grid[a] = static_cast<double>(counts_[a]);
    return grid;
}

void PulseHistogram::write_csv(std::ostream& out) const {
    out << "address,count\n";
    for (std::size_t a = 0; a < counts_.size(); ++a) out << a << ',' << counts_[a] << '\n';
}

GreyImage histogram_to_image(const PulseHistogram& h, std::size_t width, std::size_t height) {
    return rescale_to_grey(h.to_grid(width, height));
}

}  // namespace pulsegabor
