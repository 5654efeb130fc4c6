#!/usr/bin/env node
import { hideBin } from "yargs/helpers";
import { main } from "./cli.js";

process.exit(main(hideBin(process.argv)));
