#pragma once

// Walling state machine. Three states, six input symbols, transitions:
//
//   Moving  --NonNestmateEncounter-->  Walling (timer := duration)
//   Moving  --NestmateEncounter---->   Moving  (heading-away flag set)
//   Walling --MovingNestmateEncounter-> Walling (timer := duration)
//   Walling --WallingTimerExpired--->  AvoidNonNestmate
//   AvoidNonNestmate --BelowSafeDist-> AvoidNonNestmate
//   AvoidNonNestmate --AboveSafeDist-> Moving
//   everything else: self-loop.
//
// Priorities within one tick: NonNestmateEncounter beats NestmateEncounter
// in Moving; a timer reset beats expiry in Walling; BelowSafeDist beats
// AboveSafeDist if both are ever presented together.

#include <cstdint>
#include <string>

namespace swarmwall {

enum class FsmState : std::uint8_t { Moving = 0, Walling = 1, AvoidNonNestmate = 2 };

inline const char* to_string(FsmState s) {
    switch (s) {
    case FsmState::Moving: return "Moving";
    case FsmState::Walling: return "Walling";
    case FsmState::AvoidNonNestmate: return "AvoidNonNestmate";
    }
    return "?";
}

// Input symbols as a bitmask so a tick can present any subset.
enum Symbol : std::uint8_t {
    kNestmateEncounter = 1 << 0,
    kNonNestmateEncounter = 1 << 1,
    kWallingTimerExpired = 1 << 2,
    kAboveSafeDist = 1 << 3,
    kBelowSafeDist = 1 << 4,
    kMovingNestmateEncounter = 1 << 5,
};
using SymbolSet = std::uint8_t;
inline constexpr int kSymbolCount = 6;

struct ControllerFsmState {
    FsmState state = FsmState::Moving; // q0
    int walling_timer_remaining = 0;
    int walling_timer_duration = 0; // ticks; 0 or 30 in the experiments
    // Transient: set when a nestmate encounter in Moving asks for a
    // heading-away step; consumed by the next action.
    bool avoid_nestmate_flag = false;

    friend bool operator==(const ControllerFsmState&, const ControllerFsmState&) = default;
};

// Total transition function; every (state, symbol-set) pair is defined.
inline ControllerFsmState fsm_transition(ControllerFsmState s, SymbolSet symbols) {
    s.avoid_nestmate_flag = false;
    switch (s.state) {
    case FsmState::Moving:
        if (symbols & kNonNestmateEncounter) {
            s.state = FsmState::Walling;
            s.walling_timer_remaining = s.walling_timer_duration;
        } else if (symbols & kNestmateEncounter) {
            s.avoid_nestmate_flag = true;
        }
        break;
    case FsmState::Walling:
        if (symbols & kMovingNestmateEncounter) {
            s.walling_timer_remaining = s.walling_timer_duration;
        } else if (symbols & kWallingTimerExpired) {
            s.state = FsmState::AvoidNonNestmate;
        }
        break;
    case FsmState::AvoidNonNestmate:
        if (symbols & kBelowSafeDist) {
            // stay
        } else if (symbols & kAboveSafeDist) {
            s.state = FsmState::Moving;
        }
        break;
    }
    return s;
}

// Once per tick while in Walling: counts the timer down, floor 0. A
// duration of 0 therefore expires on the first tick spent in Walling.
inline ControllerFsmState fsm_tick_timer(ControllerFsmState s) {
    if (s.state == FsmState::Walling && s.walling_timer_remaining > 0)
        --s.walling_timer_remaining;
    return s;
}

} // namespace swarmwall
