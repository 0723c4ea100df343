from .api import analysis, campaigns


def created_routes(app):

    # commands are registered flat on the root app: `mdpc cycles`, not `mdpc analysis cycles`
    for router in (analysis.router, campaigns.router):
        app.registered_commands.extend(router.registered_commands)

    return app
