// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.

#ifndef MMTRACK_MMTRACK_HPP
#define MMTRACK_MMTRACK_HPP

#include "caf.hpp"
#include "channel_sim.hpp"
#include "clutter.hpp"
#include "core.hpp"
#include "csv_io.hpp"
#include "iq_io.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "scenario.hpp"
#include "strokes.hpp"
#include "tracker.hpp"
#include "waveform.hpp"

#endif
