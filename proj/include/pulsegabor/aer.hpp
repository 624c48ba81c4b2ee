#pragma once

#include "pulsegabor/grid.hpp"
#include "pulsegabor/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pulsegabor {

using Address = std::uint32_t;

struct AddressEvent {
    Address source = 0;
    Tick tick = 0;

    friend bool operator==(const AddressEvent&, const AddressEvent&) = default;
};

enum class Port : std::uint8_t { plus, minus, gate };

const char* port_name(Port port);
Port parse_port(const std::string& name);

struct RouteTarget {
    std::uint32_t target = 0;
    Port port = Port::plus;
    double weight = 1.0;  // tag scaling the delivered charge
};

struct Delivery {
    Address source = 0;
    std::uint32_t target = 0;
    Port port = Port::plus;
    double weight = 1.0;
    Tick tick = 0;

    friend bool operator==(const Delivery&, const Delivery&) = default;
};

// Source address -> fan-out list. Sources must be declared (directly or by
// connecting them) before events from them can be routed.
class RoutingTable {
public:
    explicit RoutingTable(std::size_t target_count = 0) : target_count_(target_count) {}

    void add_source(Address source);
    // Grows the target space; returns the first new target id.
    std::uint32_t add_targets(std::size_t n);
    void connect(Address source, std::uint32_t target, Port port, double weight = 1.0);

    bool has_source(Address source) const noexcept {
        return source < declared_.size() && declared_[source] != 0;
    }
    std::span<const RouteTarget> targets(Address source) const;

    std::size_t target_count() const noexcept { return target_count_; }
    std::size_t source_count() const noexcept { return source_count_; }
    std::size_t entry_count() const noexcept { return entry_count_; }

    // {"target_count": N, "routes": [{"source", "target", "port", "weight"}...]}
    nlohmann::json to_json() const;
    // Also accepts a bare route list; the target count is then inferred.
    static RoutingTable from_json(const nlohmann::json& j);

private:
    std::size_t target_count_;
    std::size_t source_count_ = 0;
    std::size_t entry_count_ = 0;
    std::vector<std::uint8_t> declared_;
    std::vector<std::vector<RouteTarget>> routes_;
};

// One delivery per (event, matching entry), sorted by (tick, source, target,
// port) so the result does not depend on event order. Unknown sources throw.
std::vector<Delivery> route(std::vector<AddressEvent> events, const RoutingTable& table);

// Per-address pulse totals over [t0, t1).
class PulseHistogram {
public:
    PulseHistogram() = default;
    PulseHistogram(std::size_t address_count, Tick t0 = 0) : t0_(t0), t1_(t0), counts_(address_count, 0) {}

    void record(Address address, std::uint64_t n = 1);
    void record(std::span<const AddressEvent> events);
    // Marks the window as covering ticks up to (excluding) t1.
    void close_window(Tick t1);

    // Concatenates the directly following window [t1, t2).
    PulseHistogram& operator+=(const PulseHistogram& later);

    std::size_t size() const noexcept { return counts_.size(); }
    std::uint64_t operator[](Address a) const { return counts_.at(a); }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t total() const noexcept;
    std::uint64_t max_count() const noexcept;
    Tick t0() const noexcept { return t0_; }
    Tick t1() const noexcept { return t1_; }

    RealGrid to_grid(std::size_t width, std::size_t height) const;
    // address,count rows
    void write_csv(std::ostream& out) const;

private:
    Tick t0_ = 0;
    Tick t1_ = 0;
    std::vector<std::uint64_t> counts_;
};

// Row-major mapping; max count -> 255, rounding half up. All-zero stays black.
GreyImage histogram_to_image(const PulseHistogram& h, std::size_t width, std::size_t height);

}  // namespace pulsegabor
