#pragma once

#include "common.hpp"
#include "contacts.hpp"
#include "controller.hpp"
#include "engine.hpp"
#include "messages.hpp"
#include "metrics.hpp"
#include "mobility.hpp"
#include "oracle.hpp"
#include "quadtree.hpp"
#include "scenarios.hpp"
#include "strategies.hpp"
