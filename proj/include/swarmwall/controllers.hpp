#pragma once

// Hand-designed walling controller: CRW exploration, stop-and-wall on
// non-nestmate encounters, flee until past the safe distance.

#include "swarmwall/fsm.hpp"
#include "swarmwall/sim.hpp"

namespace swarmwall {

// Motion for the current FSM state. Moving follows a CRW (or heads away
// from the nearest nestmate when flagged); Walling stands still;
// AvoidNonNestmate flees the nearest non-nestmate at full speed.
inline MotionCommand fsm_act(const ControllerFsmState& s, const ObservationFrame& frame,
                             const SimConfig& cfg, Rng& rng) {
    switch (s.state) {
    case FsmState::Moving:
        if (s.avoid_nestmate_flag) {
            if (const auto* mate = detail::nearest_of(frame, true))
                return {cfg.speed, wrap_angle(mate->aoa + kPi + rng.normal(0.0, cfg.crw_sigma))};
        }
        return {cfg.speed, rng.normal(0.0, cfg.crw_sigma)};
    case FsmState::Walling:
        return {0.0, 0.0};
    case FsmState::AvoidNonNestmate:
        if (const auto* other = detail::nearest_of(frame, false))
            return {cfg.speed, wrap_angle(other->aoa + kPi)};
        return {cfg.speed, rng.normal(0.0, cfg.crw_sigma)};
    }
    return {};
}

class FsmController final : public Controller {
public:
    MotionCommand decide(const SimConfig& cfg, RobotState& self, const ObservationFrame& frame,
                         Rng& rng) override {
        self.fsm = fsm_tick_timer(self.fsm);
        const SymbolSet symbols = detect_events(cfg, frame, self.fsm);
        self.fsm = fsm_transition(self.fsm, symbols);
        const MotionCommand cmd = fsm_act(self.fsm, frame, cfg, rng);
        self.fsm.avoid_nestmate_flag = false;
        return cmd;
    }

    std::string state_label(const RobotState& self) const override {
        return to_string(self.fsm.state);
    }
};

} // namespace swarmwall
