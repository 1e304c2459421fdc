#pragma once

#include "otfs_sc/types.hpp"
#include "otfs_sc/dd_transforms.hpp"
#include "otfs_sc/channel.hpp"
#include "otfs_sc/svd_precoding.hpp"
#include "otfs_sc/semantic_alloc.hpp"
#include "otfs_sc/modem.hpp"
#include "otfs_sc/link_sim.hpp"
#include "otfs_sc/losses.hpp"
#include "otfs_sc/io.hpp"
#include "otfs_sc/config.hpp"
#include "otfs_sc/validate.hpp"
