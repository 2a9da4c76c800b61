// Copyright pufbind contributors.
// Licensed under the Apache License, Version 2.0, see LICENSE for details.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "pufbind/authenticator.hpp"
#include "pufbind/bch.hpp"
#include "pufbind/bitstring.hpp"
#include "pufbind/fuzzy_extractor.hpp"
#include "pufbind/image.hpp"
#include "pufbind/picoblaze.hpp"
#include "pufbind/puf.hpp"
#include "pufbind/registry.hpp"
#include "pufbind/rng.hpp"
#include "pufbind/sha256.hpp"
